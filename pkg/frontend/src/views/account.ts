// Signed-in account screens: profile/settings, vaccination upload, bookings.

import { ApiError } from "../api.js";
import type { App } from "../context.js";
import { clear, el, errorBox, field, fmtWhen, infoBox, textInput } from "../dom.js";
import { formatPrice } from "../money.js";

export async function meView(app: App, container: HTMLElement): Promise<void> {
  const account = await app.api.me();
  app.session.updateAccount(account);
  const inputs = {
    first_name: textInput("first_name"),
    last_name: textInput("last_name"),
    city: textInput("city"),
    country: textInput("country"),
    contact_number: textInput("contact_number"),
  };
  for (const [key, input] of Object.entries(inputs)) {
    input.value = (account as any)[key] ?? "";
  }

  const profileForm = el(
    "form",
    {
      class: "card",
      onsubmit: async (event) => {
        event.preventDefault();
        const updated = await app.api.updateProfile({
          first_name: inputs.first_name.value,
          last_name: inputs.last_name.value,
          city: inputs.city.value,
          country: inputs.country.value,
          contact_number: inputs.contact_number.value,
        });
        app.session.updateAccount(updated);
        profileForm.append(infoBox("Profile saved."));
      },
    },
    el("h2", {}, "My profile"),
    el("p", { class: "muted" }, `${account.email} · ${account.role}`),
    account.loyalty
      ? el("p", {}, `Loyalty: ${account.loyalty.points} points (${account.loyalty.tier} tier)`)
      : null,
    field("First name", inputs.first_name),
    field("Last name", inputs.last_name),
    field("City", inputs.city),
    field("Country", inputs.country),
    field("Contact number", inputs.contact_number),
    el("button", { type: "submit", class: "primary" }, "Save"),
  );

  const oldPw = textInput("old_password", "", "password");
  const newPw = textInput("new_password", "", "password");
  const passwordForm = el(
    "form",
    {
      class: "card",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.changePassword(oldPw.value, newPw.value);
          passwordForm.append(infoBox("Password changed."));
        } catch (error) {
          passwordForm.append(errorBox(error instanceof ApiError ? error.message : String(error)));
        }
      },
    },
    el("h3", {}, "Privacy: change password"),
    field("Current password", oldPw),
    field("New password", newPw),
    el("button", { type: "submit" }, "Change password"),
  );

  clear(container).append(profileForm, passwordForm);
}

export async function vaccinationView(app: App, container: HTMLElement): Promise<void> {
  const account = await app.api.me();
  const front = textInput("front", "paste or type anything to stand in for the scan");
  const back = textInput("back", "back side scan");
  const form = el(
    "form",
    {
      class: "card",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.uploadVaccination(btoa(front.value || "front"), btoa(back.value || "back"));
          clear(container).append(
            el("div", { class: "card" },
              el("div", { class: "badge confirmed", "data-testid": "vaccination-ok" }, "Vaccination card on file"),
              el("p", {}, el("a", { href: "#/events" }, "Back to events"))),
          );
        } catch (error) {
          form.append(errorBox(error instanceof ApiError ? error.message : String(error)));
        }
      },
    },
    el("h2", {}, "Vaccination card"),
    account.vaccination
      ? el("div", { class: "badge confirmed", "data-testid": "vaccination-ok" }, "Both sides on file")
      : infoBox("Booking a seat requires both sides of your vaccination card."),
    field("Front side", front),
    field("Back side", back),
    el("button", { type: "submit", class: "primary", "data-testid": "vaccination-submit" }, "Upload both sides"),
  );
  clear(container).append(form);
}

export async function bookingsView(app: App, container: HTMLElement): Promise<void> {
  const page = await app.api.myBookings();
  const list = el("div", { class: "list", "data-testid": "booking-list" });
  if (page.items.length === 0) list.append(infoBox("No bookings yet."));
  for (const booking of page.items) {
    const event = await app.api.event(booking.event_id).catch(() => null);
    const card = el(
      "div",
      { class: "card", "data-booking-id": booking.id, "data-state": booking.state },
      el("h3", {}, event?.title ?? booking.event_id),
      el("p", {},
        el("span", { class: `badge ${booking.state.toLowerCase()}` }, booking.state),
        event ? ` · ${fmtWhen(event.starts_at)} · ${formatPrice(event.price_minor)}` : ""),
    );
    if (booking.state === "Reserved") {
      card.append(
        el("p", {}, `Hold expires ${fmtWhen(booking.hold_expires_at)}.`),
        el("a", { class: "button", href: `#/pay/${booking.id}` }, "Pay now"),
      );
    }
    if (booking.state !== "Released") {
      card.append(
        el("button", {
          "data-action": "cancel-booking",
          onclick: async () => {
            await app.api.cancelBooking(booking.id);
            await app.rerender();
          },
        }, booking.state === "Confirmed" ? "Cancel and refund" : "Cancel"),
      );
    }
    list.append(card);
  }
  clear(container).append(el("h2", {}, "My bookings"), list);
}
