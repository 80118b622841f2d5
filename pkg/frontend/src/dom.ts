// Tiny DOM construction helpers; no framework, just elements.

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | boolean | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value as EventListener);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
      (node as any)[key] = value;
    } else if (key === "value" && "value" in node) {
      (node as any).value = value;
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child == null) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function errorBox(message: string, code?: string): HTMLElement {
  return el("div", { class: "error-box", "data-error-code": code ?? "" }, message);
}

export function infoBox(message: string): HTMLElement {
  return el("div", { class: "info-box" }, message);
}

export function field(labelText: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, labelText), input);
}

export function textInput(name: string, placeholder = "", type = "text"): HTMLInputElement {
  return el("input", { name, placeholder, type, class: "input" });
}

export function fmtWhen(iso: string): string {
  return iso.replace("T", " ").replace("+00:00", " UTC").replace(/:\d\d UTC$/, " UTC");
}
