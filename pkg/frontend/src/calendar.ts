// Calendar view-model: a month grid whose highlighted set mirrors the
// gateway's calendar response exactly.

import type { CalendarMonth, EventDoc } from "./api.js";

export interface CalendarCell {
  day: number | null; // null pads the leading/trailing grid
  highlighted: boolean;
  availability: boolean;
  events: EventDoc[];
}

export interface CalendarViewModel {
  year: number;
  month: number;
  monthName: string;
  weeks: CalendarCell[][];
  highlighted: number[];
}

const MONTHS = [
  "January", "February", "March", "April", "May", "June",
  "July", "August", "September", "October", "November", "December",
];

export function buildCalendar(data: CalendarMonth): CalendarViewModel {
  const { year, month } = data;
  const highlighted = new Set(data.highlighted);
  const availability = new Set(data.availability_days ?? []);
  const daysInMonth = new Date(Date.UTC(year, month, 0)).getUTCDate();
  const firstWeekday = new Date(Date.UTC(year, month - 1, 1)).getUTCDay(); // 0 = Sunday

  const cells: CalendarCell[] = [];
  for (let i = 0; i < firstWeekday; i++) {
    cells.push({ day: null, highlighted: false, availability: false, events: [] });
  }
  for (let day = 1; day <= daysInMonth; day++) {
    cells.push({
      day,
      highlighted: highlighted.has(day),
      availability: availability.has(day),
      events: data.events_by_day[String(day)] ?? [],
    });
  }
  while (cells.length % 7 !== 0) {
    cells.push({ day: null, highlighted: false, availability: false, events: [] });
  }

  const weeks: CalendarCell[][] = [];
  for (let i = 0; i < cells.length; i += 7) {
    weeks.push(cells.slice(i, i + 7));
  }
  return {
    year,
    month,
    monthName: MONTHS[month - 1],
    weeks,
    highlighted: [...data.highlighted],
  };
}
