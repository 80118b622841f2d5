// Sidebar navigation, gated by role. An item renders only for roles the
// gateway would actually let through, so the UI never offers a forbidden
// action.

import type { Role } from "./session.js";

export interface NavItem {
  label: string;
  hash: string;
  roles: Role[]; // exactly who sees it
}

const EVERYONE: Role[] = ["Guest", "Reader", "Book", "Admin"];
const SIGNED_IN: Role[] = ["Reader", "Book", "Admin"];

export const NAV_ITEMS: NavItem[] = [
  { label: "Events", hash: "#/events", roles: EVERYONE },
  { label: "Books", hash: "#/books", roles: EVERYONE },
  { label: "Calendar", hash: "#/calendar", roles: EVERYONE },
  { label: "Events near you", hash: "#/nearby", roles: EVERYONE },
  { label: "My profile", hash: "#/me", roles: SIGNED_IN },
  { label: "My bookings", hash: "#/bookings", roles: SIGNED_IN },
  { label: "Messages", hash: "#/messages", roles: SIGNED_IN },
  { label: "Notifications", hash: "#/notifications", roles: SIGNED_IN },
  { label: "Vaccination card", hash: "#/vaccination", roles: SIGNED_IN },
  { label: "Become a book", hash: "#/become-book", roles: ["Reader"] },
  { label: "Book dashboard", hash: "#/dashboard", roles: ["Book"] },
  { label: "Admin dashboard", hash: "#/admin", roles: ["Admin"] },
  { label: "Payment methods", hash: "#/content/faq", roles: SIGNED_IN },
  { label: "Help", hash: "#/content/help", roles: EVERYONE },
  { label: "FAQ", hash: "#/content/faq", roles: EVERYONE },
  { label: "About us", hash: "#/content/about", roles: EVERYONE },
  { label: "Sign in", hash: "#/login", roles: ["Guest"] },
  { label: "Sign up", hash: "#/register", roles: ["Guest"] },
];

export function visibleNav(role: Role): NavItem[] {
  return NAV_ITEMS.filter((item) => item.roles.includes(role));
}

// actions rendered inside views, keyed for the role-gating crawl
export const ACTION_ROLES: Record<string, Role[]> = {
  "book-seat": SIGNED_IN,
  "cancel-booking": SIGNED_IN,
  "pay-booking": SIGNED_IN,
  "follow-book": SIGNED_IN,
  "message-book": SIGNED_IN,
  "post-review": SIGNED_IN,
  "submit-book-request": ["Reader"],
  "post-availability": ["Book"],
  "create-event": ["Book", "Admin"],
  "decide-request": ["Admin"],
};
