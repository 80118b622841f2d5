// Book catalog: search by name/profession, profiles with reviews, follow
// toggle, availability, message entry point.

import { ApiError, type BookProfile } from "../api.js";
import type { App } from "../context.js";
import { clear, el, errorBox, field, fmtWhen, infoBox, textInput } from "../dom.js";

function stars(mean: number | null): string {
  return mean === null ? "no ratings yet" : `${"★".repeat(Math.round(mean))} ${mean.toFixed(2)}`;
}

export async function booksView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const text = params.text ?? "";
  const profession = params.profession ?? "";
  const page = await app.api.searchBooks(text, profession);

  const nameInput = textInput("text", "name");
  nameInput.value = text;
  const profInput = textInput("profession", "profession");
  profInput.value = profession;
  const form = el(
    "form",
    {
      class: "searchbar",
      onsubmit: (event) => {
        event.preventDefault();
        app.navigate(
          `#/books?text=${encodeURIComponent(nameInput.value)}&profession=${encodeURIComponent(profInput.value)}`,
        );
      },
    },
    nameInput, profInput,
    el("button", { type: "submit" }, "Search books"),
  );

  const list = el("div", { class: "list", "data-testid": "book-list" });
  if (page.items.length === 0) list.append(infoBox("No books match."));
  for (const profile of page.items) {
    list.append(
      el("div", { class: "card", "data-book-id": profile.account_id },
        el("h3", {}, el("a", { href: `#/book/${profile.account_id}` }, profile.display_name)),
        el("p", { class: "muted" }, profile.profession),
        el("p", {}, `${stars(profile.rating_mean)} (${profile.review_count} reviews)`)),
    );
  }
  clear(container).append(el("h2", {}, "Books"), form, list);
}

export async function bookDetailView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const profile = await app.api.bookProfile(params.id);
  const reviews = await app.api.reviews(params.id);
  const slots = await app.api.availability(params.id);
  const session = app.session.current;

  const root = el("div", {},
    el("div", { class: "card" },
      el("h2", {}, profile.display_name),
      el("p", { class: "muted" }, profile.profession),
      el("p", {}, `${stars(profile.rating_mean)} (${profile.review_count} reviews)`)),
  );

  if (slots.items.length > 0) {
    root.append(el("div", { class: "card" },
      el("h3", {}, "Free time"),
      ...slots.items.map((slot) =>
        el("p", { class: "slot" }, `${fmtWhen(slot.starts_at)} to ${fmtWhen(slot.ends_at)}`)),
    ));
  }

  if (session && session.account.id !== profile.account_id) {
    const actions = el("div", { class: "actions" });
    const followButton = el("button", { "data-action": "follow-book", "data-testid": "follow-book" }, "Follow");
    followButton.addEventListener("click", async () => {
      await app.api.setFollow(profile.account_id, true);
      followButton.replaceWith(el("span", { class: "badge" }, "Following"));
    });
    const messageArea = el("div", {});
    const messageButton = el("button", {
      "data-action": "message-book",
      "data-testid": "message-book",
      onclick: () => {
        const body = textInput("body", "your message");
        messageArea.append(
          el("form", {
            onsubmit: async (event) => {
              event.preventDefault();
              try {
                const message = await app.api.startConversation(profile.account_id, body.value);
                app.navigate(`#/messages/${message.conversation_id}`);
              } catch (error) {
                messageArea.append(errorBox(
                  error instanceof ApiError && error.code === "NOT_FOLLOWING"
                    ? "You can only message books you follow."
                    : error instanceof ApiError ? error.message : String(error),
                  error instanceof ApiError ? error.code : undefined,
                ));
              }
            },
          }, body, el("button", { type: "submit" }, "Send")),
        );
      },
    }, "Message");
    actions.append(followButton, messageButton, messageArea);
    root.append(el("div", { class: "card" }, el("h3", {}, "Connect"), actions));
  }

  const reviewList = el("div", { class: "card" }, el("h3", {}, "Reviews"));
  if (reviews.items.length === 0) reviewList.append(infoBox("No reviews yet."));
  for (const review of reviews.items) {
    reviewList.append(el("p", {}, `${"★".repeat(review.stars)} ${review.text || "(no text)"}`));
  }
  if (session && session.account.id !== profile.account_id) {
    const starsInput = textInput("stars", "1-5");
    const textArea = textInput("text", "what did you think?");
    reviewList.append(
      el("form", {
        "data-action": "post-review",
        onsubmit: async (event) => {
          event.preventDefault();
          try {
            await app.api.postReview(profile.account_id, Number(starsInput.value), textArea.value);
            await app.rerender();
          } catch (error) {
            reviewList.append(errorBox(
              error instanceof ApiError && error.code === "NO_COMPLETED_BOOKING"
                ? "Reviews need a completed booking with this book."
                : error instanceof ApiError ? error.message : String(error),
              error instanceof ApiError ? error.code : undefined,
            ));
          }
        },
      },
        field("Stars", starsInput), field("Review", textArea),
        el("button", { type: "submit" }, "Post review")),
    );
  }
  root.append(reviewList);
  clear(container).append(root);
}
