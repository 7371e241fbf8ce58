# This file contains the response helpers shared by the HTTP routes
# It provides standardized success and error envelopes
from typing import Any, Optional

from fastapi.encoders import jsonable_encoder
from fastapi.responses import JSONResponse

from .errors import DipeError


# This function creates a standardized success response with data
def ok(message: str = "OK", data: Any = None, status_code: int = 200) -> JSONResponse:
    return JSONResponse({
        "success": True,
        "message": message,
        "data": jsonable_encoder(data),
    }, status_code=status_code)


# This function creates a standardized error response with error details
def bad(status_code: int, code: str, message: str, details: Optional[Any] = None) -> JSONResponse:
    return JSONResponse({
        "success": False,
        "error": {
            "code": code,
            "message": message,
            "details": jsonable_encoder(details),
        }
    }, status_code=status_code)


# This maps a library error onto a 400 envelope carrying its stable code
def bad_request(exc: DipeError) -> JSONResponse:
    return bad(400, exc.code, exc.message, exc.details)
