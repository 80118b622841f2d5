from .api import ROUTES, Response, authenticate_request, dispatch
from .server import GatewayServer

__all__ = ["ROUTES", "Response", "authenticate_request", "dispatch", "GatewayServer"]
