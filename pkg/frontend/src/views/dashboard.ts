// Role dashboards: become-a-book for readers, slot/event management for
// books, the approval queue for admins.

import { ApiError } from "../api.js";
import { buildCalendar } from "../calendar.js";
import type { App } from "../context.js";
import { clear, el, errorBox, field, fmtWhen, infoBox, textInput } from "../dom.js";

export async function becomeBookView(app: App, container: HTMLElement): Promise<void> {
  const role = app.session.role;
  if (role !== "Reader") {
    clear(container).append(el("div", { class: "card" },
      el("h2", {}, "Become a book"),
      infoBox(role === "Book" ? "You are already a book." : "Only readers apply to become books.")));
    return;
  }
  const existing = await app.api.bookRequests();
  const pending = existing.items.find((r) => r.state === "Pending");
  const decided = existing.items.filter((r) => r.state !== "Pending");

  const root = el("div", {});
  if (pending) {
    root.append(el("div", { class: "card" },
      el("h2", {}, "Become a book"),
      el("div", { class: "badge pending", "data-testid": "request-pending" }, "Pending admin review"),
      el("p", {}, `Submitted ${fmtWhen(pending.created_at)}. You'll get an email once it's decided.`)));
  } else {
    const inputs = {
      name: textInput("name", "public display name"),
      phone: textInput("phone"),
      cnic: textInput("cnic", "13 digits"),
      fieldOf: textInput("field", "your field of expertise"),
      vaccination: textInput("vaccination", "stand-in for the card image"),
      resume: textInput("resume", "stand-in for your resume/CV"),
    };
    const form = el(
      "form",
      {
        class: "card",
        "data-action": "submit-book-request",
        onsubmit: async (event) => {
          event.preventDefault();
          try {
            await app.api.submitBookRequest({
              name: inputs.name.value,
              phone: inputs.phone.value,
              cnic: inputs.cnic.value,
              field: inputs.fieldOf.value,
              vaccination_image: btoa(inputs.vaccination.value || "vaccination"),
              resume: btoa(inputs.resume.value || "resume"),
            });
            await app.rerender();
          } catch (error) {
            form.append(errorBox(error instanceof ApiError ? error.message : String(error),
              error instanceof ApiError ? error.code : undefined));
          }
        },
      },
      el("h2", {}, "Become a book"),
      field("Name", inputs.name),
      field("Phone", inputs.phone),
      field("CNIC", inputs.cnic),
      field("Field", inputs.fieldOf),
      field("Vaccination card (image)", inputs.vaccination),
      field("Resume/CV (file)", inputs.resume),
      el("button", { type: "submit", class: "primary", "data-testid": "submit-book-request" }, "Send request"),
    );
    root.append(form);
  }
  for (const request of decided) {
    root.append(el("div", { class: "card" },
      el("span", { class: `badge ${request.state.toLowerCase()}` }, request.state),
      el("p", {}, `Request from ${fmtWhen(request.created_at)}`)));
  }
  clear(container).append(root);
}

export async function bookDashboardView(app: App, container: HTMLElement): Promise<void> {
  const session = app.session.current;
  if (!session) return app.navigate("#/login");
  if (session.role !== "Book") {
    clear(container).append(el("div", { class: "card" },
      el("h2", {}, "Book dashboard"),
      infoBox("This dashboard belongs to accepted books.")));
    return;
  }
  const me = session.account;

  const root = el("div", { "data-testid": "book-dashboard" }, el("h2", {}, "Book dashboard"));

  // availability slot form
  const slotStart = textInput("starts_at", "2030-03-04T09:00:00Z");
  const slotEnd = textInput("ends_at", "2030-03-04T17:00:00Z");
  const slotForm = el(
    "form",
    {
      class: "card",
      "data-action": "post-availability",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.postAvailability(slotStart.value, slotEnd.value);
          await app.rerender();
        } catch (error) {
          slotForm.append(errorBox(
            error instanceof ApiError && error.code === "OVERLAPPING_SLOT"
              ? "That window overlaps a slot you already posted."
              : error instanceof ApiError ? error.message : String(error),
            error instanceof ApiError ? error.code : undefined,
          ));
        }
      },
    },
    el("h3", {}, "Post free time"),
    field("From (UTC)", slotStart),
    field("To (UTC)", slotEnd),
    el("button", { type: "submit", class: "primary", "data-testid": "post-slot" }, "Post slot"),
  );
  const slots = await app.api.availability(me.id);
  for (const slot of slots.items) {
    slotForm.append(el("p", { class: "slot" }, `${fmtWhen(slot.starts_at)} to ${fmtWhen(slot.ends_at)}`));
  }
  root.append(slotForm);

  // event creation form
  const inputs = {
    kind: el("select", { name: "kind" },
      el("option", { value: "PrivateSession" }, "Private session"),
      el("option", { value: "PublicEvent" }, "Public event")),
    title: textInput("title"),
    starts: textInput("starts_at", "2030-03-04T10:00:00Z"),
    ends: textInput("ends_at", "2030-03-04T11:00:00Z"),
    capacity: textInput("capacity", "1"),
    price: textInput("price_minor", "paisa, e.g. 150000"),
    venueName: textInput("venue_name"),
    venueAddress: textInput("venue_address"),
    lat: textInput("latitude", "25.396"),
    lon: textInput("longitude", "68.377"),
  };
  const eventForm = el(
    "form",
    {
      class: "card",
      "data-action": "create-event",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.createEvent({
            kind: (inputs.kind as HTMLSelectElement).value,
            title: inputs.title.value,
            starts_at: inputs.starts.value,
            ends_at: inputs.ends.value,
            capacity: Number(inputs.capacity.value || "1"),
            price_minor: Number(inputs.price.value || "0"),
            venue: {
              name: inputs.venueName.value,
              address: inputs.venueAddress.value,
              latitude: Number(inputs.lat.value),
              longitude: Number(inputs.lon.value),
            },
          });
          await app.rerender();
        } catch (error) {
          eventForm.append(errorBox(
            error instanceof ApiError && error.code === "OUTSIDE_AVAILABILITY"
              ? "Private sessions must sit inside one of your posted slots."
              : error instanceof ApiError ? error.message : String(error),
            error instanceof ApiError ? error.code : undefined,
          ));
        }
      },
    },
    el("h3", {}, "Create an event or session"),
    field("Kind", inputs.kind),
    field("Session name", inputs.title),
    field("Starts (UTC)", inputs.starts),
    field("Ends (UTC)", inputs.ends),
    field("Capacity", inputs.capacity),
    field("Price (paisa)", inputs.price),
    field("Venue name", inputs.venueName),
    field("Venue address", inputs.venueAddress),
    field("Latitude", inputs.lat),
    field("Longitude", inputs.lon),
    el("button", { type: "submit", class: "primary", "data-testid": "create-event" }, "Create"),
  );
  root.append(eventForm);

  // this month's calendar with own availability marked
  const now = new Date();
  const data = await app.api.calendarMonth(now.getUTCFullYear(), now.getUTCMonth() + 1);
  const vm = buildCalendar(data);
  root.append(el("div", { class: "card" },
    el("h3", {}, `${vm.monthName} at a glance`),
    el("p", {}, `Event days: ${vm.highlighted.join(", ") || "none"}`),
    el("p", {}, `Your availability days: ${(data.availability_days ?? []).join(", ") || "none"}`)));

  clear(container).append(root);
}

export async function adminView(app: App, container: HTMLElement): Promise<void> {
  if (app.session.role !== "Admin") {
    clear(container).append(el("div", { class: "card" }, infoBox("Admins only.")));
    return;
  }
  const pending = await app.api.bookRequests("Pending");
  const decided = await app.api.bookRequests().then(
    (page) => page.items.filter((r) => r.state !== "Pending"),
  );

  const root = el("div", { "data-testid": "admin-dashboard" }, el("h2", {}, "Admin dashboard"));
  const queue = el("div", { class: "card" }, el("h3", {}, "Pending book requests"));
  if (pending.items.length === 0) queue.append(infoBox("Queue is empty."));
  for (const request of pending.items) {
    const row = el(
      "div",
      { class: "queue-row", "data-request-id": request.id },
      el("span", {}, `${request.name} — ${request.field_of_expertise}`),
      el("button", {
        class: "primary",
        "data-action": "decide-request",
        "data-decision": "Accepted",
        onclick: async () => {
          try {
            await app.api.decideBookRequest(request.id, "Accepted");
            await app.rerender();
          } catch (error) {
            if (error instanceof ApiError && error.code === "ALREADY_DECIDED") {
              row.append(errorBox("Another admin decided this one first.", error.code));
            } else {
              throw error;
            }
          }
        },
      }, "Accept"),
      el("button", {
        "data-action": "decide-request",
        "data-decision": "Rejected",
        onclick: async () => {
          try {
            await app.api.decideBookRequest(request.id, "Rejected");
            await app.rerender();
          } catch (error) {
            if (error instanceof ApiError && error.code === "ALREADY_DECIDED") {
              row.append(errorBox("Another admin decided this one first.", error.code));
            } else {
              throw error;
            }
          }
        },
      }, "Reject"),
    );
    queue.append(row);
  }
  root.append(queue);

  const history = el("div", { class: "card" }, el("h3", {}, "Decided"));
  for (const request of decided) {
    history.append(el("p", {},
      el("span", { class: `badge ${request.state.toLowerCase()}` }, request.state),
      ` ${request.name} — ${request.field_of_expertise}`));
  }
  root.append(history);

  // the management team posts public events from here
  const inputs = {
    title: textInput("title"),
    starts: textInput("starts_at", "2030-03-04T10:00:00Z"),
    ends: textInput("ends_at", "2030-03-04T12:00:00Z"),
    capacity: textInput("capacity", "25"),
    price: textInput("price_minor", "paisa"),
    venueName: textInput("venue_name"),
    venueAddress: textInput("venue_address"),
    lat: textInput("latitude", "25.396"),
    lon: textInput("longitude", "68.377"),
  };
  const eventForm = el(
    "form",
    {
      class: "card",
      "data-action": "create-event",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.createEvent({
            kind: "PublicEvent",
            title: inputs.title.value,
            starts_at: inputs.starts.value,
            ends_at: inputs.ends.value,
            capacity: Number(inputs.capacity.value || "10"),
            price_minor: Number(inputs.price.value || "0"),
            venue: {
              name: inputs.venueName.value,
              address: inputs.venueAddress.value,
              latitude: Number(inputs.lat.value),
              longitude: Number(inputs.lon.value),
            },
          });
          eventForm.append(infoBox("Event posted; everyone gets a notification."));
        } catch (error) {
          eventForm.append(errorBox(error instanceof ApiError ? error.message : String(error)));
        }
      },
    },
    el("h3", {}, "Post a public event"),
    field("Title", inputs.title),
    field("Starts (UTC)", inputs.starts),
    field("Ends (UTC)", inputs.ends),
    field("Capacity", inputs.capacity),
    field("Price (paisa)", inputs.price),
    field("Venue name", inputs.venueName),
    field("Venue address", inputs.venueAddress),
    field("Latitude", inputs.lat),
    field("Longitude", inputs.lon),
    el("button", { type: "submit", class: "primary" }, "Post event"),
  );
  root.append(eventForm);
  clear(container).append(root);
}
