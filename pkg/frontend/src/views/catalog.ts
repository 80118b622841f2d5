// Event catalog: search with category tabs, nearby search, detail screen
// with the reserve -> pick provider -> confirm payment flow, month calendar.

import { ApiError, type EventDoc } from "../api.js";
import { buildCalendar } from "../calendar.js";
import type { App } from "../context.js";
import { clear, el, errorBox, field, fmtWhen, infoBox, textInput } from "../dom.js";
import { formatPrice } from "../money.js";

const CATEGORIES = ["All", "Events", "PrivateSession"] as const;

function eventCard(app: App, event: EventDoc, extra?: string): HTMLElement {
  return el(
    "div",
    { class: "card event-card", "data-event-id": event.id },
    el("h3", {}, el("a", { href: `#/event/${event.id}` }, event.title)),
    el("p", { class: "muted" },
      `${event.kind === "PrivateSession" ? "Private session" : "Event"} · ${fmtWhen(event.starts_at)}`),
    el("p", {}, `${event.venue.name}, ${event.venue.address}`),
    el("p", { class: "price" }, formatPrice(event.price_minor), extra ? ` · ${extra}` : ""),
  );
}

export async function eventsView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const category = (params.category as (typeof CATEGORIES)[number]) || "All";
  const text = params.text ?? "";
  const page = await app.api.searchEvents({ category, text });

  const search = textInput("text", "search events or books");
  search.value = text;
  const tabs = el(
    "div",
    { class: "tabs" },
    ...CATEGORIES.map((c) =>
      el("a", {
        class: `tab${c === category ? " active" : ""}`,
        href: `#/events?category=${c}${text ? `&text=${encodeURIComponent(text)}` : ""}`,
      }, c === "PrivateSession" ? "Private session" : c),
    ),
  );
  const form = el(
    "form",
    {
      class: "searchbar",
      onsubmit: (event) => {
        event.preventDefault();
        app.navigate(`#/events?category=${category}&text=${encodeURIComponent(search.value)}`);
      },
    },
    search,
    el("button", { type: "submit" }, "Search"),
  );

  const list = el("div", { class: "list", "data-testid": "event-list" });
  if (page.items.length === 0) {
    list.append(infoBox("No upcoming events match."));
  }
  for (const event of page.items) list.append(eventCard(app, event));
  clear(container).append(el("h2", {}, "Upcoming"), form, tabs, list);
}

export async function nearbyView(app: App, container: HTMLElement): Promise<void> {
  const lat = textInput("lat", "latitude");
  const lon = textInput("lon", "longitude");
  const radius = textInput("radius", "radius km");
  radius.value = "25";
  const list = el("div", { class: "list" });
  const form = el(
    "form",
    {
      class: "searchbar",
      onsubmit: async (event) => {
        event.preventDefault();
        clear(list);
        try {
          const page = await app.api.eventsNear(Number(lat.value), Number(lon.value), Number(radius.value));
          if (page.items.length === 0) list.append(infoBox("Nothing within that radius."));
          for (const hit of page.items) {
            list.append(eventCard(app, hit.event, `${hit.distance_km.toFixed(1)} km away`));
          }
        } catch (error) {
          list.append(errorBox(error instanceof ApiError ? error.message : String(error)));
        }
      },
    },
    lat, lon, radius,
    el("button", { type: "submit" }, "Find events near you"),
  );
  clear(container).append(el("h2", {}, "Events near you"), form, list);
}

export async function eventDetailView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const event = await app.api.event(params.id);
  const root = el("div", { class: "card event-detail" },
    el("h2", {}, event.title),
    el("p", {}, `Session date: ${fmtWhen(event.starts_at)} to ${fmtWhen(event.ends_at)}`),
    el("p", {}, `Session address: ${event.venue.name}, ${event.venue.address}`),
    el("p", {},
      `Location: ${event.venue.latitude.toFixed(4)}, ${event.venue.longitude.toFixed(4)} `,
      el("a", {
        href: `https://www.openstreetmap.org/?mlat=${event.venue.latitude}&mlon=${event.venue.longitude}`,
        target: "_blank",
      }, "open map")),
    el("p", {}, `Capacity: ${event.capacity} · ${formatPrice(event.price_minor)}`),
  );
  if (event.host_book_id) {
    const host = await app.api.bookProfile(event.host_book_id).catch(() => null);
    if (host) {
      root.append(el("p", {}, "Hosted by ", el("a", { href: `#/book/${host.account_id}` }, host.display_name)));
    }
  }

  const session = app.session.current;
  const actions = el("div", { class: "actions" });
  if (!session) {
    actions.append(
      el("button", {
        class: "primary",
        "data-testid": "book-seat-guest",
        onclick: () => app.navigate("#/register"),
      }, "Sign up to book a seat"),
    );
  } else {
    actions.append(
      el("button", {
        class: "primary",
        "data-action": "book-seat",
        "data-testid": "book-seat",
        onclick: async () => {
          try {
            const booking = await app.api.bookSeat(event.id);
            app.navigate(`#/pay/${booking.id}`);
          } catch (error) {
            root.querySelectorAll(".error-box").forEach((n) => n.remove());
            if (error instanceof ApiError && error.code === "NOT_VACCINATED") {
              root.append(errorBox("Upload both sides of your vaccination card first.", error.code));
              root.append(el("p", {}, el("a", { href: "#/vaccination" }, "Upload vaccination card")));
            } else if (error instanceof ApiError && error.code === "SOLD_OUT") {
              const button = actions.querySelector("button");
              if (button) button.disabled = true;
              root.append(errorBox("Sold out: no seats left for this event.", error.code));
            } else {
              root.append(errorBox(error instanceof ApiError ? error.message : String(error)));
            }
          }
        },
      }, "Book a seat"),
    );
  }
  root.append(actions);
  clear(container).append(root);
}

export async function paymentView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const booking = await app.api.myBookings().then(
    (page) => page.items.find((b) => b.id === params.id) ?? null,
  );
  if (!booking) {
    clear(container).append(errorBox("No such booking."));
    return;
  }
  const event = await app.api.event(booking.event_id);
  const root = el("div", { class: "card" },
    el("h2", {}, "Payment"),
    el("p", {}, `Seat reserved for ${event.title}.`),
    el("p", {}, `Hold expires at ${fmtWhen(booking.hold_expires_at)}; pay before then to confirm.`),
    el("p", { class: "price" }, formatPrice(event.price_minor)),
  );

  const status = el("div", { "data-testid": "payment-status" });
  const providers = el("div", { class: "actions" });
  for (const provider of ["Easypaisa", "JazzCash"] as const) {
    providers.append(
      el("button", {
        class: "primary",
        "data-action": "pay-booking",
        "data-provider": provider,
        onclick: async () => {
          clear(status);
          try {
            const intent = await app.api.createPayment(booking.id, provider);
            renderConfirm(intent.id, intent.amount_minor, intent.discount_minor);
          } catch (error) {
            status.append(errorBox(error instanceof ApiError ? error.message : String(error),
              error instanceof ApiError ? error.code : undefined));
          }
        },
      }, `Pay with ${provider}`),
    );
  }

  const renderConfirm = (intentId: string, amountMinor: number, discountMinor: number) => {
    clear(providers);
    clear(status).append(
      infoBox(discountMinor > 0
        ? `Loyalty discount applied: ${formatPrice(discountMinor)} off. Charging ${formatPrice(amountMinor)}.`
        : `Charging ${formatPrice(amountMinor)}.`),
      el("div", { class: "actions" },
        el("button", {
          class: "primary",
          "data-testid": "confirm-payment",
          onclick: async () => {
            try {
              await app.api.confirmPayment(intentId, "success");
              clear(status).append(
                el("div", { class: "badge confirmed", "data-testid": "booking-confirmed" }, "Confirmed"),
                el("p", {}, el("a", { href: "#/bookings" }, "See my bookings")),
              );
            } catch (error) {
              status.append(errorBox(error instanceof ApiError ? error.message : String(error)));
            }
          },
        }, "Simulate provider success"),
        el("button", {
          "data-testid": "fail-payment",
          onclick: async () => {
            try {
              await app.api.confirmPayment(intentId, "failure");
              clear(status).append(
                errorBox("The provider declined the charge. Your seat is still held; try again before the hold expires.", "PAYMENT_FAILED"),
              );
              paymentView(app, container, params); // back to provider choice, hold unchanged
            } catch (error) {
              status.append(errorBox(error instanceof ApiError ? error.message : String(error)));
            }
          },
        }, "Simulate provider failure"),
      ),
    );
  };

  root.append(providers, status);
  clear(container).append(root);
}

export async function calendarView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const today = new Date();
  const year = Number(params.year ?? today.getUTCFullYear());
  const month = Number(params.month ?? today.getUTCMonth() + 1);
  const data = await app.api.calendarMonth(year, month);
  const vm = buildCalendar(data);

  const prev = month === 1 ? `#/calendar?year=${year - 1}&month=12` : `#/calendar?year=${year}&month=${month - 1}`;
  const next = month === 12 ? `#/calendar?year=${year + 1}&month=1` : `#/calendar?year=${year}&month=${month + 1}`;

  const table = el("table", { class: "calendar" });
  table.append(el("tr", {}, ...["Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"].map((d) => el("th", {}, d))));
  for (const week of vm.weeks) {
    table.append(
      el("tr", {}, ...week.map((cell) => {
        if (cell.day === null) return el("td", { class: "pad" });
        const classes = ["day"];
        if (cell.highlighted) classes.push("highlighted");
        if (cell.availability) classes.push("availability");
        return el(
          "td",
          { class: classes.join(" "), "data-day": String(cell.day) },
          el("span", { class: "daynum" }, String(cell.day)),
          ...cell.events.map((e) => el("div", { class: "chip" }, el("a", { href: `#/event/${e.id}` }, e.title))),
        );
      })),
    );
  }
  clear(container).append(
    el("h2", {}, `${vm.monthName} ${year}`),
    el("p", {}, el("a", { href: prev }, "← previous"), " · ", el("a", { href: next }, "next →")),
    table,
  );
}

export async function contentView(app: App, container: HTMLElement, params: Record<string, string>): Promise<void> {
  const page = await app.api.content(params.page as "help" | "faq" | "about");
  clear(container).append(el("div", { class: "card" }, el("h2", {}, page.title), el("p", {}, page.body)));
}
