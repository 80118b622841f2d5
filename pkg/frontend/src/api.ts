// Typed client for the golib gateway. Every non-2xx response carries the
// uniform envelope {error: {code, message, status}} and is surfaced as an
// ApiError so views can branch on stable codes.

export interface ApiErrorBody {
  code: string;
  message: string;
  status: number;
  fields?: Record<string, string>;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly fields?: Record<string, string>;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = body.status;
    this.fields = body.fields;
  }
}

export interface Account {
  id: string;
  email: string;
  first_name: string;
  last_name: string;
  city: string;
  country: string;
  contact_number: string;
  role: "Reader" | "Book" | "Admin";
  vaccination: { front_image_ref: string; back_image_ref: string; uploaded_at: string } | null;
  created_at: string;
  loyalty?: Loyalty;
}

export interface Loyalty {
  account_id: string;
  points: number;
  tier: "None" | "Silver" | "Gold";
}

export interface Venue {
  name: string;
  address: string;
  latitude: number;
  longitude: number;
}

export interface EventDoc {
  id: string;
  kind: "PublicEvent" | "PrivateSession";
  title: string;
  host_book_id: string | null;
  venue: Venue;
  starts_at: string;
  ends_at: string;
  capacity: number;
  price_minor: number;
}

export interface BookProfile {
  account_id: string;
  display_name: string;
  profession: string;
  bio: string;
  rating_mean: number | null;
  review_count: number;
}

export interface Booking {
  id: string;
  event_id: string;
  reader_id: string;
  state: "Reserved" | "Confirmed" | "Released";
  reserved_at: string;
  hold_expires_at: string;
  payment_id: string | null;
}

export interface PaymentIntent {
  id: string;
  booking_id: string;
  provider: "Easypaisa" | "JazzCash";
  base_amount_minor: number;
  discount_minor: number;
  amount_minor: number;
  state: "Created" | "Captured" | "Failed" | "Refunded";
}

export interface BookRequest {
  id: string;
  applicant_id: string;
  name: string;
  field_of_expertise: string;
  state: "Pending" | "Accepted" | "Rejected";
  created_at: string;
}

export interface Review {
  id: string;
  book_id: string;
  author_id: string;
  stars: number;
  text: string;
  created_at: string;
}

export interface Slot {
  id: string;
  book_id: string;
  starts_at: string;
  ends_at: string;
}

export interface Conversation {
  id: string;
  reader_id: string;
  book_id: string;
  last_message_at?: string;
}

export interface Message {
  id: string;
  conversation_id: string;
  sender_id: string;
  body: string;
  sent_at: string;
}

export interface Notification {
  id: string;
  recipient_id: string;
  kind: "EventCreated" | "FreeSlotPosted" | "BookDecision";
  subject_id: string;
  created_at: string;
  read: boolean;
}

export interface Page<T> {
  items: T[];
  next_cursor: string | null;
  total: number | null;
  unread_count?: number;
}

export interface CalendarMonth {
  year: number;
  month: number;
  highlighted: number[];
  events_by_day: Record<string, EventDoc[]>;
  availability_days?: number[];
}

export type Unauthorized = () => void;

export class ApiClient {
  private token: string | null = null;
  onUnauthorized: Unauthorized | null = null;

  constructor(readonly baseUrl: string = "") {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) return undefined as T;
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const error = new ApiError(
        payload?.error ?? { code: "UNKNOWN", message: `HTTP ${response.status}`, status: response.status },
      );
      if (error.status === 401 && this.token && this.onUnauthorized) this.onUnauthorized();
      throw error;
    }
    return payload as T;
  }

  get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>("POST", path, body ?? {});
  }

  put<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("PUT", path, body);
  }

  patch<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("PATCH", path, body);
  }

  delete<T>(path: string): Promise<T> {
    return this.request<T>("DELETE", path);
  }

  // --- auth -----------------------------------------------------------------

  register(fields: {
    email: string; first_name: string; last_name: string;
    city: string; country: string; password: string; contact_number?: string;
  }): Promise<Account> {
    return this.post("/v1/auth/register", fields);
  }

  login(email: string, password: string): Promise<{ token: string; account: Account }> {
    return this.post("/v1/auth/login", { email, password });
  }

  forgotPassword(email: string): Promise<{ status: string }> {
    return this.post("/v1/auth/forgot", { email });
  }

  resetPassword(email: string, code: string, newPassword: string): Promise<{ status: string }> {
    return this.post("/v1/auth/reset", { email, code, new_password: newPassword });
  }

  logout(): Promise<void> {
    return this.post("/v1/auth/logout");
  }

  me(): Promise<Account> {
    return this.get("/v1/me");
  }

  updateProfile(profile: Partial<Account>): Promise<Account> {
    return this.patch("/v1/me", { profile });
  }

  changePassword(oldPassword: string, newPassword: string): Promise<Account> {
    return this.patch("/v1/me", { old_password: oldPassword, new_password: newPassword });
  }

  uploadVaccination(frontB64: string, backB64: string): Promise<unknown> {
    return this.put("/v1/me/vaccination", { front_image: frontB64, back_image: backB64 });
  }

  // --- catalog ---------------------------------------------------------------

  searchBooks(text = "", profession = ""): Promise<Page<BookProfile>> {
    const q = new URLSearchParams();
    if (text) q.set("text", text);
    if (profession) q.set("profession", profession);
    return this.get(`/v1/books?${q}`);
  }

  bookProfile(id: string): Promise<BookProfile> {
    return this.get(`/v1/books/${id}`);
  }

  reviews(bookId: string): Promise<Page<Review>> {
    return this.get(`/v1/books/${bookId}/reviews`);
  }

  postReview(bookId: string, stars: number, text: string): Promise<{ review: Review; profile: BookProfile }> {
    return this.post(`/v1/books/${bookId}/reviews`, { stars, text });
  }

  setFollow(bookId: string, following: boolean): Promise<{ book_id: string; following: boolean }> {
    return this.put(`/v1/books/${bookId}/follow`, { following });
  }

  availability(bookId: string): Promise<Page<Slot>> {
    return this.get(`/v1/availability?book_id=${bookId}`);
  }

  // --- events and bookings ------------------------------------------------------

  searchEvents(opts: { category?: string; text?: string } = {}): Promise<Page<EventDoc>> {
    const q = new URLSearchParams();
    if (opts.category) q.set("category", opts.category);
    if (opts.text) q.set("text", opts.text);
    return this.get(`/v1/events?${q}`);
  }

  eventsNear(lat: number, lon: number, radiusKm: number): Promise<Page<{ event: EventDoc; distance_km: number }>> {
    return this.get(`/v1/events?lat=${lat}&lon=${lon}&radius_km=${radiusKm}`);
  }

  event(id: string): Promise<EventDoc> {
    return this.get(`/v1/events/${id}`);
  }

  createEvent(fields: {
    kind: string; title: string; venue: Venue; starts_at: string; ends_at: string;
    capacity: number; price_minor: number;
  }): Promise<EventDoc> {
    return this.post("/v1/events", fields);
  }

  bookSeat(eventId: string): Promise<Booking> {
    return this.post(`/v1/events/${eventId}/bookings`);
  }

  myBookings(): Promise<Page<Booking>> {
    return this.get("/v1/bookings");
  }

  cancelBooking(bookingId: string): Promise<Booking> {
    return this.delete(`/v1/bookings/${bookingId}`);
  }

  createPayment(bookingId: string, provider: string): Promise<PaymentIntent> {
    return this.post(`/v1/bookings/${bookingId}/payment`, { provider });
  }

  confirmPayment(intentId: string, outcome: "success" | "failure"): Promise<PaymentIntent> {
    return this.post(`/v1/payments/${intentId}/confirm`, { outcome });
  }

  calendarMonth(year: number, month: number): Promise<CalendarMonth> {
    return this.get(`/v1/calendar?year=${year}&month=${month}`);
  }

  postAvailability(startsAt: string, endsAt: string): Promise<Slot> {
    return this.post("/v1/availability", { starts_at: startsAt, ends_at: endsAt });
  }

  // --- become a book / admin ------------------------------------------------------

  submitBookRequest(fields: {
    name: string; phone: string; cnic: string; field: string;
    vaccination_image: string; resume: string;
  }): Promise<BookRequest> {
    return this.post("/v1/book-requests", fields);
  }

  bookRequests(state?: string): Promise<Page<BookRequest>> {
    return this.get(`/v1/book-requests${state ? `?state=${state}` : ""}`);
  }

  decideBookRequest(id: string, decision: "Accepted" | "Rejected"): Promise<BookRequest> {
    return this.post(`/v1/book-requests/${id}/decision`, { decision });
  }

  // --- comms ------------------------------------------------------------------------

  conversations(): Promise<Page<Conversation>> {
    return this.get("/v1/conversations");
  }

  startConversation(bookId: string, body: string): Promise<Message> {
    return this.post("/v1/conversations", { book_id: bookId, body });
  }

  messages(conversationId: string): Promise<Page<Message>> {
    return this.get(`/v1/conversations/${conversationId}/messages`);
  }

  reply(conversationId: string, body: string): Promise<Message> {
    return this.post(`/v1/conversations/${conversationId}/messages`, { body });
  }

  notifications(): Promise<Page<Notification>> {
    return this.get("/v1/notifications");
  }

  markRead(notificationId: string): Promise<Notification> {
    return this.post(`/v1/notifications/${notificationId}/read`);
  }

  content(page: "help" | "faq" | "about"): Promise<{ title: string; body: string }> {
    return this.get(`/v1/content/${page}`);
  }
}
