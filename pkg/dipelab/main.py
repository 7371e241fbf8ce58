# This is the HTTP entry point of the laboratory
# It sets up the FastAPI application with the coefficient, planner, simulation and verification routes
import logging

import uvicorn
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import RedirectResponse

from . import __version__, routes
from .config import configure_logging, get_settings
from .errors import DipeError
from .utils import bad, bad_request, ok

logger = logging.getLogger(__name__)

# This sets the port, API prefix and docs path from the environment-backed settings
settings = get_settings()
PORT = settings.port
API_PREFIX = settings.api_prefix
DOCS_PATH = settings.docs_path

# This creates the application; Swagger UI and the OpenAPI schema live under the prefix
app = FastAPI(
    title="DIPE Laboratory API",
    description="Distributed inner-product estimation with local randomized measurements",
    version=__version__,
    openapi_url=f"{API_PREFIX}/openapi.json",
    docs_url=DOCS_PATH,
)

# This lets the configured origins (DIPE_CORS_ORIGINS) call the laboratory
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# This redirects the root URL to the API documentation page
@app.get("/")
def root_redirect():
    return RedirectResponse(url=DOCS_PATH)


# This endpoint lists the laboratory routes
@app.get(f"{API_PREFIX}/")
def index():
    return ok("DIPE Laboratory API", {
        "coeffs": f"{API_PREFIX}/coeffs?family={{family}}",
        "plan": [f"{API_PREFIX}/plan", f"{API_PREFIX}/plan/table"],
        "simulate": f"{API_PREFIX}/simulate",
        "verify": f"{API_PREFIX}/verify/{{suite}}",
        "docs": DOCS_PATH,
    })


app.include_router(routes.router, prefix=API_PREFIX)


# This installs the package log handler once the server starts
@app.on_event("startup")
async def startup_event():
    configure_logging()
    logger.info("serving under %s", API_PREFIX)


# This turns library errors that escape a route into 400 envelopes
@app.exception_handler(DipeError)
async def on_dipe_error(_req: Request, exc: DipeError):
    return bad_request(exc)


# This catches any unhandled exceptions and returns a standardized error response
@app.exception_handler(Exception)
async def on_exception(_req: Request, exc: Exception):
    logger.exception("unhandled error")
    return bad(500, "SERVER_ERROR", "Something went wrong", str(exc))


if __name__ == "__main__":
    uvicorn.run("dipelab.main:app", host="0.0.0.0", port=PORT)
