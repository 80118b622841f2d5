// Application shell: hash router, role-gated sidebar, notification badge.

import { ApiClient } from "./api.js";
import type { App, View } from "./context.js";
import { clear, el } from "./dom.js";
import { visibleNav } from "./nav.js";
import { SessionStore } from "./session.js";
import { becomeBookView, bookDashboardView, adminView } from "./views/dashboard.js";
import { bookDetailView, booksView } from "./views/books.js";
import { bookingsView, meView, vaccinationView } from "./views/account.js";
import { calendarView, contentView, eventDetailView, eventsView, nearbyView, paymentView } from "./views/catalog.js";
import { conversationView, conversationsView, notificationsView } from "./views/comms.js";
import { forgotView, loginView, registerView, resetView } from "./views/auth.js";

interface RouteEntry {
  pattern: string; // "#/event/{id}"
  view: View;
  signedIn?: boolean;
}

const ROUTES: RouteEntry[] = [
  { pattern: "#/events", view: eventsView },
  { pattern: "#/event/{id}", view: eventDetailView },
  { pattern: "#/nearby", view: nearbyView },
  { pattern: "#/calendar", view: calendarView },
  { pattern: "#/books", view: booksView },
  { pattern: "#/book/{id}", view: bookDetailView },
  { pattern: "#/content/{page}", view: contentView },
  { pattern: "#/login", view: loginView },
  { pattern: "#/register", view: registerView },
  { pattern: "#/forgot", view: forgotView },
  { pattern: "#/reset", view: resetView },
  { pattern: "#/me", view: meView, signedIn: true },
  { pattern: "#/vaccination", view: vaccinationView, signedIn: true },
  { pattern: "#/bookings", view: bookingsView, signedIn: true },
  { pattern: "#/pay/{id}", view: paymentView, signedIn: true },
  { pattern: "#/become-book", view: becomeBookView, signedIn: true },
  { pattern: "#/dashboard", view: bookDashboardView, signedIn: true },
  { pattern: "#/admin", view: adminView, signedIn: true },
  { pattern: "#/messages", view: conversationsView, signedIn: true },
  { pattern: "#/messages/{id}", view: conversationView, signedIn: true },
  { pattern: "#/notifications", view: notificationsView, signedIn: true },
];

function matchRoute(hash: string): { entry: RouteEntry; params: Record<string, string> } | null {
  const [path, queryString] = hash.split("?");
  const segments = path.replace(/^#\//, "").split("/");
  for (const entry of ROUTES) {
    const want = entry.pattern.replace(/^#\//, "").split("/");
    if (want.length !== segments.length) continue;
    const params: Record<string, string> = {};
    let ok = true;
    for (let i = 0; i < want.length; i++) {
      if (want[i].startsWith("{")) params[want[i].slice(1, -1)] = decodeURIComponent(segments[i]);
      else if (want[i] !== segments[i]) { ok = false; break; }
    }
    if (!ok) continue;
    if (queryString) {
      for (const [key, value] of new URLSearchParams(queryString)) params[key] = value;
    }
    return { entry, params };
  }
  return null;
}

export interface AppOptions {
  baseUrl?: string;
  storage?: Storage;
  pollMs?: number; // 0 disables the notification poll
}

export class GolibApp implements App {
  readonly api: ApiClient;
  readonly session: SessionStore;
  private readonly root: HTMLElement;
  private readonly pollMs: number;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private badge: HTMLElement | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.api = new ApiClient(options.baseUrl ?? "");
    this.session = new SessionStore(options.storage ?? window.localStorage);
    this.pollMs = options.pollMs ?? 10_000;
    if (this.session.current) this.api.setToken(this.session.current.token);
    this.api.onUnauthorized = () => {
      this.session.clear();
      this.api.setToken(null);
      this.navigate("#/login");
    };
  }

  start(): void {
    window.addEventListener("hashchange", () => void this.rerender());
    if (!window.location.hash) window.location.hash = "#/events";
    if (this.pollMs > 0) {
      this.pollTimer = setInterval(() => void this.refreshBadge(), this.pollMs);
    }
    void this.rerender();
  }

  stop(): void {
    if (this.pollTimer) clearInterval(this.pollTimer);
  }

  navigate(hash: string): void {
    if (window.location.hash === hash) {
      void this.rerender();
    } else {
      window.location.hash = hash; // hashchange listener rerenders
    }
  }

  async refreshBadge(): Promise<void> {
    if (!this.badge) return;
    if (!this.session.current) {
      this.badge.textContent = "";
      return;
    }
    try {
      const page = await this.api.notifications();
      const unread = page.unread_count ?? 0;
      this.badge.textContent = unread > 0 ? String(unread) : "";
    } catch {
      // auth expiry is handled by onUnauthorized; ignore transient errors
    }
  }

  async rerender(): Promise<void> {
    const role = this.session.role;
    const account = this.session.current?.account ?? null;

    const badge = el("span", { class: "nav-badge", "data-testid": "notification-badge" });
    this.badge = badge;
    const nav = el(
      "nav",
      { class: "sidebar", "data-testid": "sidebar" },
      el("h1", {}, el("a", { href: "#/events" }, "golib")),
      account
        ? el("p", { class: "whoami" }, `${account.first_name || account.email} (${role})`)
        : el("p", { class: "whoami" }, "Browsing as guest"),
      ...visibleNav(role).map((item) =>
        el("a", { class: "nav-item", href: item.hash, "data-nav": item.label },
          item.label, item.label === "Notifications" ? badge : null),
      ),
      account
        ? el("a", {
            class: "nav-item",
            href: "#/events",
            "data-nav": "Logout",
            onclick: async () => {
              await this.api.logout().catch(() => undefined);
              this.session.clear();
              this.api.setToken(null);
              this.navigate("#/events");
            },
          }, "Logout")
        : null,
    );

    const main = el("main", { class: "content" });
    const shell = el("div", { class: "shell" }, nav, main);
    clear(this.root).append(shell);

    const match = matchRoute(window.location.hash || "#/events");
    if (!match) {
      main.append(el("div", { class: "card" }, "Page not found.", el("a", { href: "#/events" }, "Go home")));
      return;
    }
    if (match.entry.signedIn && !this.session.current) {
      loginView(this, main);
      return;
    }
    try {
      await match.entry.view(this, main, match.params);
    } catch (error) {
      main.append(el("div", { class: "error-box" }, `Something went wrong: ${String(error)}`));
    }
    await this.refreshBadge();
  }
}

export function createApp(root: HTMLElement, options: AppOptions = {}): GolibApp {
  return new GolibApp(root, options);
}
