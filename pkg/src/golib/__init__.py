"""golib: a human-library booking platform.

Readers discover expert "books", reserve seats in events or private
sessions, pay through simulated local wallet providers, and message the
books they follow. Admins govern who may become a book.
"""

__version__ = "0.1.0"
