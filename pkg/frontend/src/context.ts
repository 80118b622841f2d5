import type { ApiClient } from "./api.js";
import type { SessionStore } from "./session.js";

export interface App {
  api: ApiClient;
  session: SessionStore;
  navigate(hash: string): void;
  rerender(): Promise<void>;
  refreshBadge(): Promise<void>;
}

export type View = (app: App, container: HTMLElement, params: Record<string, string>) => Promise<void> | void;
