// Conversations and notifications.

import { ApiError } from "../api.js";
import type { App } from "../context.js";
import { clear, el, errorBox, fmtWhen, infoBox, textInput } from "../dom.js";

export async function conversationsView(app: App, container: HTMLElement): Promise<void> {
  const page = await app.api.conversations();
  const me = app.session.current?.account.id;
  const list = el("div", { class: "list", "data-testid": "conversation-list" });
  if (page.items.length === 0) {
    list.append(infoBox("No conversations yet. Follow a book and say hello from its profile."));
  }
  for (const conv of page.items) {
    const otherId = conv.reader_id === me ? conv.book_id : conv.reader_id;
    const other = await app.api.bookProfile(otherId).catch(() => null);
    list.append(el("div", { class: "card" },
      el("a", { href: `#/messages/${conv.id}` }, other?.display_name ?? otherId),
      el("p", { class: "muted" }, conv.last_message_at ? `last message ${fmtWhen(conv.last_message_at)}` : "")));
  }
  clear(container).append(el("h2", {}, "Messages"), list);
}

export async function conversationView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const page = await app.api.messages(params.id);
  const me = app.session.current?.account.id;
  const thread = el("div", { class: "thread", "data-testid": "message-thread" });
  for (const message of page.items) {
    thread.append(el("div", {
      class: `bubble ${message.sender_id === me ? "mine" : "theirs"}`,
    }, message.body, el("span", { class: "muted tiny" }, ` ${fmtWhen(message.sent_at)}`)));
  }
  const body = textInput("body", "write a message");
  const form = el(
    "form",
    {
      class: "composer",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.reply(params.id, body.value);
          await app.rerender();
        } catch (error) {
          form.append(errorBox(error instanceof ApiError ? error.message : String(error),
            error instanceof ApiError ? error.code : undefined));
        }
      },
    },
    body,
    el("button", { type: "submit", class: "primary", "data-testid": "send-message" }, "Send"),
  );
  clear(container).append(el("h2", {}, "Conversation"), thread, form);
}

export async function notificationsView(app: App, container: HTMLElement): Promise<void> {
  const page = await app.api.notifications();
  const list = el("div", { class: "list", "data-testid": "notification-list" });
  if (page.items.length === 0) list.append(infoBox("Nothing yet."));
  for (const note of page.items) {
    const label =
      note.kind === "EventCreated" ? "New event posted"
      : note.kind === "FreeSlotPosted" ? "A book you follow posted free time"
      : "Your become-a-book request was decided";
    const card = el(
      "div",
      { class: `card note${note.read ? " read" : " unread"}`, "data-kind": note.kind },
      el("p", {}, label),
      el("p", { class: "muted tiny" }, fmtWhen(note.created_at)),
    );
    if (note.kind === "EventCreated") {
      card.append(el("a", { href: `#/event/${note.subject_id}` }, "View event"));
    }
    if (!note.read) {
      card.append(el("button", {
        onclick: async () => {
          await app.api.markRead(note.id);
          await app.refreshBadge();
          await app.rerender();
        },
      }, "Mark read"));
    }
    list.append(card);
  }
  clear(container).append(el("h2", {}, "Notifications"), list);
}
