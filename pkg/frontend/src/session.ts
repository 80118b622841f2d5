// Client session: the bearer token plus an account summary. Role gates the
// visible navigation exactly like the gateway's authorization matrix gates
// the routes; a 401 clears the session.

import type { Account } from "./api.js";

export type Role = "Guest" | "Reader" | "Book" | "Admin";

export interface ClientSession {
  token: string;
  role: Role;
  account: Account;
}

const KEY = "golib.session";

export class SessionStore {
  private session: ClientSession | null = null;

  constructor(private readonly storage: Storage) {
    const raw = storage.getItem(KEY);
    if (raw) {
      try {
        this.session = JSON.parse(raw) as ClientSession;
      } catch {
        storage.removeItem(KEY);
      }
    }
  }

  get current(): ClientSession | null {
    return this.session;
  }

  get role(): Role {
    return this.session?.role ?? "Guest";
  }

  set(token: string, account: Account): ClientSession {
    this.session = { token, role: account.role, account };
    this.storage.setItem(KEY, JSON.stringify(this.session));
    return this.session;
  }

  updateAccount(account: Account): void {
    if (!this.session) return;
    this.session = { ...this.session, account, role: account.role };
    this.storage.setItem(KEY, JSON.stringify(this.session));
  }

  clear(): void {
    this.session = null;
    this.storage.removeItem(KEY);
  }
}
