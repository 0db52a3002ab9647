"""Scenario export and URL encoding for collaboration.

Two query parameters are honored everywhere (CLI, server, web UI):

* ``data`` -- the scenario itself, by value: unpadded base64url of the
  compact canonical JSON document.
* ``id``   -- a hosted scenario, by reference: an opaque identifier that
  maps to a URI against a configurable base.
"""

from __future__ import annotations

import base64
import binascii
import warnings
from dataclasses import dataclass
from urllib.parse import parse_qs, urlsplit

from cfs.errors import CfsError
from cfs.schema import (
    JsonSyntaxError,
    Scenario,
    ScenarioUri,
    SchemaViolationError,
    canonical_json,
    parse_scenario,
)

__all__ = [
    "MalformedPayloadError",
    "NoPayloadError",
    "PayloadTooLargeError",
    "ScenarioRef",
    "ShareUrl",
    "ShareUrlSizeWarning",
    "decode_payload",
    "decode_scenario",
    "encode_payload",
    "encode_scenario",
]

# Practical URL limits: warn where mail clients start truncating, refuse
# where common servers reject the request line.
WARN_URL_LENGTH = 2000
MAX_URL_LENGTH = 8000

INLINE_ORIGIN = ScenarioUri("inline:data")


class PayloadTooLargeError(CfsError):
    pass


class MalformedPayloadError(CfsError):
    pass


class NoPayloadError(CfsError):
    pass


class ShareUrlSizeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ShareUrl:
    base: str
    payload: str

    @property
    def url(self) -> str:
        sep = "&" if "?" in self.base else "?"
        return f"{self.base}{sep}data={self.payload}"

    def __str__(self) -> str:
        return self.url


@dataclass(frozen=True)
class ScenarioRef:
    """An ``id``-style reference: resolved later, never fetched here."""

    identifier: str

    def to_uri(self, base: str) -> ScenarioUri:
        """Map the identifier to a fetchable URI.

        ``base`` either contains an ``{id}`` placeholder or is treated as
        a directory-style prefix.
        """
        if "{id}" in base:
            return ScenarioUri(base.replace("{id}", self.identifier))
        return ScenarioUri(base.rstrip("/") + "/" + self.identifier)


def encode_payload(scenario: Scenario) -> str:
    """Unpadded base64url of the canonical JSON document."""
    raw = canonical_json(scenario).encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii").rstrip("=")


def decode_payload(payload: str, origin: ScenarioUri = INLINE_ORIGIN) -> Scenario:
    pad = "=" * (-len(payload) % 4)
    try:
        raw = base64.b64decode(payload + pad, altchars=b"-_", validate=True)
    except (binascii.Error, ValueError) as exc:
        raise MalformedPayloadError(f"payload is not valid base64url: {exc}") from exc
    try:
        return parse_scenario(raw, origin)
    except (JsonSyntaxError, SchemaViolationError, UnicodeDecodeError) as exc:
        raise MalformedPayloadError(f"payload does not decode to a scenario: {exc}") from exc


def encode_scenario(scenario: Scenario, viewer_base: str) -> ShareUrl:
    """Encode a scenario into a shareable viewer URL.

    Deterministic: equal scenarios produce equal URLs.  Warns past
    WARN_URL_LENGTH characters and refuses past MAX_URL_LENGTH.
    """
    share = ShareUrl(viewer_base, encode_payload(scenario))
    length = len(share.url)
    if length > MAX_URL_LENGTH:
        raise PayloadTooLargeError(
            f"share URL is {length} characters (limit {MAX_URL_LENGTH}); "
            "host the scenario instead"
        )
    if length > WARN_URL_LENGTH:
        warnings.warn(
            f"share URL is {length} characters; some clients truncate beyond "
            f"{WARN_URL_LENGTH}",
            ShareUrlSizeWarning,
            stacklevel=2,
        )
    return share


def decode_scenario(url_or_param: str) -> Scenario | ScenarioRef:
    """Decode a share URL, query string, or bare payload value.

    ``data`` payloads decode to the scenario itself; ``id`` parameters
    come back as a ScenarioRef indirection for the caller to resolve.
    """
    text = url_or_param.strip()
    if not text:
        raise NoPayloadError("empty input")
    if "?" in text or text.startswith(("data=", "id=")):
        query = urlsplit(text).query if "?" in text else text
        params = parse_qs(query, keep_blank_values=True)
        if "data" in params:
            origin = ScenarioUri(text) if "://" in text else INLINE_ORIGIN
            return decode_payload(params["data"][0], origin)
        if "id" in params:
            identifier = params["id"][0]
            if not identifier:
                raise MalformedPayloadError("'id' parameter is empty")
            return ScenarioRef(identifier)
        raise NoPayloadError("no 'data' or 'id' parameter present")
    return decode_payload(text)
