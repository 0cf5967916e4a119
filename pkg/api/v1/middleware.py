"""
=============================================================================
api/v1/middleware.py - Middleware для API v1
=============================================================================

Логирование запросов к /api/v1 и ограничение частоты запросов с одного
адреса (скользящее окно).

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import time
from collections import defaultdict, deque
from typing import Callable, Deque, Dict

from fastapi import Request, Response
from fastapi.responses import JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware

from processing import console


API_PREFIX = "/api/v1"


class APILoggingMiddleware(BaseHTTPMiddleware):
    """Пишет метод, путь, статус и длительность каждого запроса к API v1"""

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        if not request.url.path.startswith(API_PREFIX):
            return await call_next(request)

        started = time.perf_counter()
        try:
            response = await call_next(request)
        except Exception as e:
            console.log(f"ERROR [{request.method}] {request.url.path}: {e}", "API")
            return JSONResponse(status_code=500, content={
                "error": "internal_server_error",
                "message": "Internal server error occurred",
                "details": {"exception": type(e).__name__},
            })

        elapsed = time.perf_counter() - started
        response.headers["X-Process-Time"] = f"{elapsed:.4f}"
        console.log(f"[{request.method}] {request.url.path} - {response.status_code}, {elapsed:.3f}s", "API")
        return response


class RateLimitMiddleware(BaseHTTPMiddleware):
    """Не более max_requests запросов к API v1 за window_seconds с одного адреса"""

    def __init__(self, app, max_requests: int = 100, window_seconds: int = 60):
        super().__init__(app)
        self.max_requests = max_requests
        self.window_seconds = window_seconds
        self._hits: Dict[str, Deque[float]] = defaultdict(deque)

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        if not request.url.path.startswith(API_PREFIX):
            return await call_next(request)

        client_ip = request.client.host if request.client else "unknown"
        now = time.monotonic()
        hits = self._hits[client_ip]
        while hits and now - hits[0] >= self.window_seconds:
            hits.popleft()

        if len(hits) >= self.max_requests:
            return JSONResponse(
                status_code=429,
                content={
                    "error": "rate_limit_exceeded",
                    "message": f"Rate limit exceeded: {self.max_requests} requests "
                               f"per {self.window_seconds} seconds",
                    "details": {"retry_after": self.window_seconds},
                },
                headers={"Retry-After": str(self.window_seconds),
                         "X-RateLimit-Limit": str(self.max_requests),
                         "X-RateLimit-Remaining": "0"},
            )

        hits.append(now)
        response = await call_next(request)
        response.headers["X-RateLimit-Limit"] = str(self.max_requests)
        response.headers["X-RateLimit-Remaining"] = str(self.max_requests - len(hits))
        return response


# =============================================================================
# ФУНКЦИИ ДЛЯ УСТАНОВКИ MIDDLEWARE
# =============================================================================

def setup_middleware(app, max_requests: int = 100, window_seconds: int = 60):
    """Устанавливает middleware логирования и rate limiting"""
    app.add_middleware(APILoggingMiddleware)
    app.add_middleware(RateLimitMiddleware, max_requests=max_requests, window_seconds=window_seconds)
    console.log(f"Middleware установлены ({max_requests} req/{window_seconds}s)", "API")
