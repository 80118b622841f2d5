"""Domain error catalog.

Every business-rule failure raises a DomainError carrying a stable machine
code. The gateway maps each code to exactly one HTTP status; codes never
change meaning once shipped.
"""
from __future__ import annotations


class DomainError(Exception):
    code = "DOMAIN_ERROR"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.message = message or self.code.replace("_", " ").lower()
        self.details = details


def _err(name: str, code: str) -> type:
    return type(name, (DomainError,), {"code": code})


# identity
InvalidEmail = _err("InvalidEmail", "INVALID_EMAIL")
WeakPassword = _err("WeakPassword", "WEAK_PASSWORD")
DuplicateEmail = _err("DuplicateEmail", "DUPLICATE_EMAIL")
InvalidCredentials = _err("InvalidCredentials", "INVALID_CREDENTIALS")
UnsupportedAuthMethod = _err("UnsupportedAuthMethod", "UNSUPPORTED_AUTH_METHOD")
OtpInvalid = _err("OtpInvalid", "OTP_INVALID")
OtpExpired = _err("OtpExpired", "OTP_EXPIRED")
OtpConsumed = _err("OtpConsumed", "OTP_CONSUMED")
MissingSide = _err("MissingSide", "MISSING_SIDE")
ImageTooLarge = _err("ImageTooLarge", "IMAGE_TOO_LARGE")
InvalidToken = _err("InvalidToken", "INVALID_TOKEN")

# directory
MissingField = _err("MissingField", "MISSING_FIELD")
DuplicatePendingRequest = _err("DuplicatePendingRequest", "DUPLICATE_PENDING_REQUEST")
AlreadyBook = _err("AlreadyBook", "ALREADY_BOOK")
NotAdmin = _err("NotAdmin", "NOT_ADMIN")
AlreadyDecided = _err("AlreadyDecided", "ALREADY_DECIDED")
UnknownRequest = _err("UnknownRequest", "UNKNOWN_REQUEST")
UnknownBook = _err("UnknownBook", "UNKNOWN_BOOK")
NotABook = _err("NotABook", "NOT_A_BOOK")
StarsOutOfRange = _err("StarsOutOfRange", "STARS_OUT_OF_RANGE")
SelfReview = _err("SelfReview", "SELF_REVIEW")
DuplicateReview = _err("DuplicateReview", "DUPLICATE_REVIEW")
NoCompletedBooking = _err("NoCompletedBooking", "NO_COMPLETED_BOOKING")

# scheduling
NotAuthorized = _err("NotAuthorized", "NOT_AUTHORIZED")
OutsideAvailability = _err("OutsideAvailability", "OUTSIDE_AVAILABILITY")
InvalidTimeRange = _err("InvalidTimeRange", "INVALID_TIME_RANGE")
InvalidCapacity = _err("InvalidCapacity", "INVALID_CAPACITY")
OverlappingSlot = _err("OverlappingSlot", "OVERLAPPING_SLOT")
CoordinateOutOfRange = _err("CoordinateOutOfRange", "COORDINATE_OUT_OF_RANGE")
InvalidRadius = _err("InvalidRadius", "INVALID_RADIUS")
SoldOut = _err("SoldOut", "SOLD_OUT")
NotVaccinated = _err("NotVaccinated", "NOT_VACCINATED")
DuplicateBooking = _err("DuplicateBooking", "DUPLICATE_BOOKING")
EventInPast = _err("EventInPast", "EVENT_IN_PAST")
NotOwner = _err("NotOwner", "NOT_OWNER")
AlreadyReleased = _err("AlreadyReleased", "ALREADY_RELEASED")
InvalidMonth = _err("InvalidMonth", "INVALID_MONTH")
UnknownEvent = _err("UnknownEvent", "UNKNOWN_EVENT")
UnknownBooking = _err("UnknownBooking", "UNKNOWN_BOOKING")

# payments
HoldExpired = _err("HoldExpired", "HOLD_EXPIRED")
DuplicateIntent = _err("DuplicateIntent", "DUPLICATE_INTENT")
UnknownProvider = _err("UnknownProvider", "UNKNOWN_PROVIDER")
UnknownIntent = _err("UnknownIntent", "UNKNOWN_INTENT")
AlreadyFinal = _err("AlreadyFinal", "ALREADY_FINAL")
NotCaptured = _err("NotCaptured", "NOT_CAPTURED")
AlreadyRefunded = _err("AlreadyRefunded", "ALREADY_REFUNDED")

# comms
NotFollowing = _err("NotFollowing", "NOT_FOLLOWING")
NoConversation = _err("NoConversation", "NO_CONVERSATION")
EmptyBody = _err("EmptyBody", "EMPTY_BODY")
NotParticipant = _err("NotParticipant", "NOT_PARTICIPANT")
NotRecipient = _err("NotRecipient", "NOT_RECIPIENT")
UnknownNotification = _err("UnknownNotification", "UNKNOWN_NOTIFICATION")

# store
ConflictExhausted = _err("ConflictExhausted", "CONFLICT_EXHAUSTED")
StorageFailure = _err("StorageFailure", "STORAGE_FAILURE")
CorruptStore = _err("CorruptStore", "CORRUPT_STORE")

# gateway
ValidationFailed = _err("ValidationFailed", "VALIDATION_FAILED")
UnknownRoute = _err("UnknownRoute", "UNKNOWN_ROUTE")
MethodNotAllowed = _err("MethodNotAllowed", "METHOD_NOT_ALLOWED")
