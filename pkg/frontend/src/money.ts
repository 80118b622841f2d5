// Money arrives as integer minor units (paisa). The client only formats:
// amount_minor / 100 to exactly two decimals, no other arithmetic.

export function formatMinor(amountMinor: number): string {
  const sign = amountMinor < 0 ? "-" : "";
  const abs = Math.abs(amountMinor);
  const rupees = Math.floor(abs / 100);
  const paisa = abs % 100;
  return `${sign}${rupees}.${paisa.toString().padStart(2, "0")}`;
}

export function formatPrice(amountMinor: number): string {
  return amountMinor === 0 ? "Free" : `PKR ${formatMinor(amountMinor)}`;
}
