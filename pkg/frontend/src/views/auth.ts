// Sign-up, sign-in, forgot/reset screens.

import { ApiError } from "../api.js";
import type { App } from "../context.js";
import { clear, el, errorBox, field, infoBox, textInput } from "../dom.js";

function showError(container: HTMLElement, error: unknown): void {
  container.querySelectorAll(".error-box").forEach((node) => node.remove());
  if (error instanceof ApiError) {
    container.append(errorBox(error.message, error.code));
  } else {
    container.append(errorBox(String(error)));
  }
}

export function loginView(app: App, container: HTMLElement): void {
  const email = textInput("email", "you@example.pk", "email");
  const password = textInput("password", "", "password");
  const form = el(
    "form",
    {
      class: "card auth-form",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          const { token, account } = await app.api.login(email.value, password.value);
          app.api.setToken(token);
          app.session.set(token, account);
          app.navigate("#/events");
        } catch (error) {
          showError(form, error);
        }
      },
    },
    el("h2", {}, "Sign in"),
    field("Email", email),
    field("Password", password),
    el("button", { type: "submit", class: "primary", "data-testid": "login-submit" }, "Sign in"),
    el("p", {},
      el("a", { href: "#/forgot" }, "Forgot password?"), " · ",
      el("a", { href: "#/register" }, "New here? Sign up")),
  );
  clear(container).append(form);
}

export function registerView(app: App, container: HTMLElement): void {
  const inputs = {
    email: textInput("email", "you@example.pk", "email"),
    first_name: textInput("first_name"),
    last_name: textInput("last_name"),
    city: textInput("city"),
    country: textInput("country"),
    contact_number: textInput("contact_number"),
    password: textInput("password", "at least 8 characters", "password"),
  };
  const form = el(
    "form",
    {
      class: "card auth-form",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.register({
            email: inputs.email.value,
            first_name: inputs.first_name.value,
            last_name: inputs.last_name.value,
            city: inputs.city.value,
            country: inputs.country.value,
            contact_number: inputs.contact_number.value,
            password: inputs.password.value,
          });
          const { token, account } = await app.api.login(inputs.email.value, inputs.password.value);
          app.api.setToken(token);
          app.session.set(token, account);
          app.navigate("#/events");
        } catch (error) {
          showError(form, error);
        }
      },
    },
    el("h2", {}, "Sign up"),
    field("Email", inputs.email),
    field("First name", inputs.first_name),
    field("Last name", inputs.last_name),
    field("City", inputs.city),
    field("Country", inputs.country),
    field("Contact number", inputs.contact_number),
    field("Password", inputs.password),
    el("button", { type: "submit", class: "primary", "data-testid": "register-submit" }, "Create account"),
  );
  clear(container).append(form);
}

export function forgotView(app: App, container: HTMLElement): void {
  const email = textInput("email", "you@example.pk", "email");
  const form = el(
    "form",
    {
      class: "card auth-form",
      onsubmit: async (event) => {
        event.preventDefault();
        await app.api.forgotPassword(email.value);
        form.append(infoBox("If that address is registered, a 6-digit code is on its way."));
        app.navigate(`#/reset?email=${encodeURIComponent(email.value)}`);
      },
    },
    el("h2", {}, "Forgot password"),
    field("Email", email),
    el("button", { type: "submit", class: "primary" }, "Send code"),
  );
  clear(container).append(form);
}

export function resetView(app: App, container: HTMLElement, params: Record<string, string>): void {
  const email = textInput("email", "", "email");
  if (params.email) email.value = params.email;
  const code = textInput("code", "6-digit code");
  const password = textInput("new_password", "new password", "password");
  const form = el(
    "form",
    {
      class: "card auth-form",
      onsubmit: async (event) => {
        event.preventDefault();
        try {
          await app.api.resetPassword(email.value, code.value, password.value);
          app.navigate("#/login");
        } catch (error) {
          showError(form, error);
        }
      },
    },
    el("h2", {}, "Choose a new password"),
    field("Email", email),
    field("OTP code", code),
    field("New password", password),
    el("button", { type: "submit", class: "primary" }, "Reset password"),
  );
  clear(container).append(form);
}
