# api/middleware/__init__.py
from .error_handler import setup_exception_handlers
