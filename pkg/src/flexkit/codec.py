"""Flex-offer message codec.

Parses and serializes the JSON wire format: a top-level "flexOffer"
object holding metadata, a "flexOfferProfileConstraints" array (slice
bounds, or dependency matrices, or uncertainty polynomials, with an
optional trailing total-energy entry) and optional schedules.

Serialization is canonical: fixed key order, numbers printed with up to
six decimals (trailing zeros trimmed), datetimes as
"YYYY-MM-DDThh:mm:ss.SSS+0000".  Parsing a canonical document and
re-serializing it reproduces the exact bytes.  Unknown top-level keys
are preserved on round-trip.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any

from . import uncertain as _uncertain
from .errors import ValidationError
from .model import (
    EnergyBounds,
    FlexOffer,
    GeoLocation,
    HalfspaceMatrix,
    LifecycleState,
    PriceBounds,
    Schedule,
    ScheduleKind,
    ScheduleSlice,
    SliceConstraint,
    epoch_interval,
)
from .uncertain import UncertainFunction

_MANDATORY = {
    "id": "ID",
    "state": "State",
    "numSecondsPerInterval": "NumSecondsPerInterval",
    "creationTime": "CreationTime",
    "offeredById": "OfferedByID",
    "startAfterTime": "StartAfterTime",
    "startBeforeTime": "StartBeforeTime",
    "flexOfferProfileConstraints": "FlexOfferProfileConstraints",
}

_KNOWN_KEYS = frozenset(
    {
        "id", "state", "stateReason", "creationInterval", "creationTime",
        "offeredById", "locationId", "acceptanceBeforeInterval",
        "assignmentBeforeInterval", "startAfterInterval", "startBeforeInterval",
        "endAfterInterval", "endBeforeInterval", "acceptanceBeforeTime",
        "assignmentBeforeTime", "numSecondsPerInterval", "startAfterTime",
        "startBeforeTime", "endAfterTime", "endBeforeTime",
        "priceConstraintStartTime", "flexOfferProfileConstraints",
        "defaultSchedule", "flexOfferSchedule",
    }
)

_DFO_KEYS = ("DependencyEnergyConstraintList", "DependencyEnergy ConstraintList")
_UFO_KEYS = ("UncertainEnergyConstraintList", "UncertainEnergy ConstraintList")
_TEC_KEYS = ("TotalEnergyConstraints", "TotalEnergyConstraint")
_COST_KEYS = ("TotalCostConstraints", "TotalCostConstraint")


def parse_message(text: str | bytes) -> FlexOffer:
    """Parse one flex-offer message; raises ValidationError on any
    missing mandatory attribute, malformed datetime or non-numeric bound."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("message must be a JSON object")
    body = doc.get("flexOffer", doc)
    if not isinstance(body, dict):
        raise ValidationError("flexOffer must be a JSON object")

    for key, name in _MANDATORY.items():
        if key not in body:
            raise ValidationError(f"missing mandatory attribute {name}")

    raw_id = body["id"]
    if not isinstance(raw_id, (str, int)) or isinstance(raw_id, bool):
        raise ValidationError("ID must be a string or integer")
    try:
        state = LifecycleState(body["state"])
    except ValueError:
        raise ValidationError(f"unknown state {body['state']!r}") from None

    nspi = _int(body["numSecondsPerInterval"], "NumSecondsPerInterval")
    creation_time = _parse_datetime(body["creationTime"], "CreationTime")
    creation_interval = (
        _int(body["creationInterval"], "CreationInterval")
        if "creationInterval" in body
        else epoch_interval(creation_time, nspi)
    )

    profile, total_energy, total_cost, dependency, uncertain = _parse_profile(
        body["flexOfferProfileConstraints"]
    )

    location = None
    if "locationId" in body:
        loc = body["locationId"].get("userLocation", body["locationId"])
        location = GeoLocation(
            longitude=_number(loc.get("longitude"), "longitude"),
            latitude=_number(loc.get("latitude"), "latitude"),
        )

    extra = tuple(
        (key, body[key]) for key in body if key not in _KNOWN_KEYS
    )

    return FlexOffer(
        id=str(raw_id),
        state=state,
        state_reason=body.get("stateReason"),
        num_seconds_per_interval=nspi,
        creation_time=creation_time,
        creation_interval=creation_interval,
        offered_by_id=str(body["offeredById"]),
        location=location,
        accept_before_time=_opt_datetime(body, "acceptanceBeforeTime"),
        accept_before_interval=_opt_int(body, "acceptanceBeforeInterval"),
        assignment_before_time=_opt_datetime(body, "assignmentBeforeTime"),
        assignment_before_interval=_opt_int(body, "assignmentBeforeInterval"),
        start_after_time=_parse_datetime(body["startAfterTime"], "StartAfterTime"),
        start_before_time=_parse_datetime(body["startBeforeTime"], "StartBeforeTime"),
        start_after_interval=_opt_int(body, "startAfterInterval"),
        start_before_interval=_opt_int(body, "startBeforeInterval"),
        end_after_time=_opt_datetime(body, "endAfterTime"),
        end_after_interval=_opt_int(body, "endAfterInterval"),
        end_before_time=_opt_datetime(body, "endBeforeTime"),
        end_before_interval=_opt_int(body, "endBeforeInterval"),
        price_constraint_start_time=_opt_datetime(body, "priceConstraintStartTime"),
        profile=profile,
        total_energy=total_energy,
        total_cost=total_cost,
        dependency=dependency,
        uncertain=uncertain,
        default_schedule=(
            parse_schedule(body["defaultSchedule"], ScheduleKind.DEFAULT)
            if "defaultSchedule" in body
            else None
        ),
        flexoffer_schedule=(
            parse_schedule(body["flexOfferSchedule"], ScheduleKind.FLEXOFFER)
            if "flexOfferSchedule" in body
            else None
        ),
        extra=extra,
    )


def _parse_profile(entries):
    if not isinstance(entries, list) or not entries:
        raise ValidationError("FlexOfferProfileConstraints must be a non-empty array")
    slices: list[SliceConstraint] = []
    matrices: list[HalfspaceMatrix] = []
    functions: list[UncertainFunction] = []
    total_energy = total_cost = None
    kinds_seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ValidationError("profile constraint entries must be objects")
        tec = _first_key(entry, _TEC_KEYS)
        cost = _first_key(entry, _COST_KEYS)
        dfo = _first_key(entry, _DFO_KEYS)
        ufo = _first_key(entry, _UFO_KEYS)
        if tec is not None or cost is not None:
            if tec is not None:
                if total_energy is not None:
                    raise ValidationError("at most one total energy constraint entry")
                total_energy = _parse_bounds_list(entry[tec], "TotalEnergyConstraint")
            if cost is not None:
                total_cost = _parse_bounds_list(entry[cost], "TotalCostConstraint")
            continue
        if total_energy is not None or total_cost is not None:
            raise ValidationError("total constraint entries must come last")
        price = _parse_price(entry.get("priceConstraint"))
        min_d = _opt_int(entry, "minDuration") or 1
        max_d = _opt_int(entry, "maxDuration") or 1
        if ufo is not None:
            kinds_seen.add("uncertain")
            polys = _parse_polynomials(entry[ufo])
            if "energyConstraintList" in entry:
                domain = _parse_bounds_list(entry["energyConstraintList"], "EnergyConstraintsList")
            else:
                domain = _uncertain.implied_domain(polys)
                if domain is None:
                    raise ValidationError(
                        "uncertain constraint has no derivable energy domain; "
                        "an explicit energyConstraintList is required"
                    )
            functions.append(UncertainFunction(domain=domain, polys=polys))
            slices.append(
                SliceConstraint(energy=domain, price=price, min_duration=min_d, max_duration=max_d)
            )
        elif dfo is not None:
            kinds_seen.add("dependency")
            matrix = HalfspaceMatrix(rows=_parse_matrix(entry[dfo]))
            matrices.append(matrix)
            slices.append(
                SliceConstraint(
                    energy=matrix.y_bounds(), price=price,
                    min_duration=min_d, max_duration=max_d,
                )
            )
        else:
            kinds_seen.add("slice")
            if "energyConstraintList" not in entry:
                raise ValidationError("missing mandatory attribute EnergyConstraintsList")
            bounds = _parse_bounds_list(entry["energyConstraintList"], "EnergyConstraintsList")
            slices.append(
                SliceConstraint(energy=bounds, price=price, min_duration=min_d, max_duration=max_d)
            )
    if len(kinds_seen) > 1:
        raise ValidationError("profile mixes different constraint families")
    if not slices:
        raise ValidationError("profile consists of at least one profile constraint")
    return (
        tuple(slices),
        total_energy,
        total_cost,
        tuple(matrices) if matrices else None,
        tuple(functions) if functions else None,
    )


def serialize_message(fo: FlexOffer) -> str:
    """Canonical wire form of an offer; inverse of parse_message."""
    body: dict[str, Any] = {}
    extra = dict(fo.extra)
    body["id"] = fo.id
    body["state"] = fo.state.value
    _put(body, "stateReason", fo.state_reason)
    interval = fo.creation_interval
    if interval is None:
        interval = epoch_interval(fo.creation_time, fo.num_seconds_per_interval)
    body["creationInterval"] = interval
    body["offeredById"] = fo.offered_by_id
    if fo.location is not None:
        body["locationId"] = {
            "userLocation": {
                "longitude": fo.location.longitude,
                "latitude": fo.location.latitude,
            }
        }
    _put(body, "acceptanceBeforeInterval", fo.accept_before_interval)
    _put(body, "assignmentBeforeInterval", fo.assignment_before_interval)
    _put(body, "startAfterInterval", fo.start_after_interval)
    _put(body, "startBeforeInterval", fo.start_before_interval)
    _put(body, "endAfterInterval", fo.end_after_interval)
    _put(body, "endBeforeInterval", fo.end_before_interval)
    if "assignment" in extra:
        body["assignment"] = extra.pop("assignment")
    body["flexOfferProfileConstraints"] = _profile_node(fo)
    _put(body, "acceptanceBeforeTime", _fmt_datetime_opt(fo.accept_before_time))
    _put(body, "assignmentBeforeTime", _fmt_datetime_opt(fo.assignment_before_time))
    body["numSecondsPerInterval"] = fo.num_seconds_per_interval
    body["startAfterTime"] = _fmt_datetime(fo.start_after_time)
    body["startBeforeTime"] = _fmt_datetime(fo.start_before_time)
    _put(body, "endAfterTime", _fmt_datetime_opt(fo.end_after_time))
    _put(body, "endBeforeTime", _fmt_datetime_opt(fo.end_before_time))
    _put(body, "priceConstraintStartTime", _fmt_datetime_opt(fo.price_constraint_start_time))
    body["creationTime"] = _fmt_datetime(fo.creation_time)
    if "correct" in extra:
        body["correct"] = extra.pop("correct")
    body.update(extra)
    if fo.default_schedule is not None:
        body["defaultSchedule"] = serialize_schedule(fo.default_schedule)
    if fo.flexoffer_schedule is not None:
        body["flexOfferSchedule"] = serialize_schedule(fo.flexoffer_schedule)
    return _dumps({"flexOffer": body}) + "\n"


def _profile_node(fo: FlexOffer) -> list:
    entries = []
    for t, constraint in enumerate(fo.profile):
        entry: dict[str, Any] = {}
        if fo.dependency is not None:
            entry["DependencyEnergyConstraintList"] = [
                list(row) for row in fo.dependency[t].rows
            ]
        elif fo.uncertain is not None:
            func = fo.uncertain[t]
            entry["UncertainEnergyConstraintList"] = [list(p) for p in func.polys]
            try:
                implied = _uncertain.implied_domain(func.polys)
            except ValidationError:
                implied = None
            if implied != func.domain:
                entry["energyConstraintList"] = [
                    {"lower": func.domain.lower, "upper": func.domain.upper}
                ]
        else:
            entry["energyConstraintList"] = [
                {"lower": constraint.energy.lower, "upper": constraint.energy.upper}
            ]
        if constraint.price is not None:
            entry["priceConstraint"] = {
                "minPrice": constraint.price.min_price,
                "maxPrice": constraint.price.max_price,
            }
        entry["minDuration"] = constraint.min_duration
        entry["maxDuration"] = constraint.max_duration
        entries.append(entry)
    if fo.total_energy is not None:
        entries.append(
            {"TotalEnergyConstraints": [
                {"lower": fo.total_energy.lower, "upper": fo.total_energy.upper}
            ]}
        )
    if fo.total_cost is not None:
        entries.append(
            {"TotalCostConstraints": [
                {"lower": fo.total_cost.lower, "upper": fo.total_cost.upper}
            ]}
        )
    return entries


def parse_schedule(node, kind: ScheduleKind = ScheduleKind.DEFAULT) -> Schedule:
    if not isinstance(node, dict):
        raise ValidationError("schedule must be a JSON object")
    raw_slices = node.get("scheduleSlices")
    if not isinstance(raw_slices, list) or not raw_slices:
        raise ValidationError("schedule consists of at least one slice")
    slices = []
    for s in raw_slices:
        if "energyAmount" not in s:
            raise ValidationError("missing mandatory attribute EnergyAmount")
        duration = _opt_int(s, "duration") or 1
        price = _number(s["price"], "Price") if "price" in s else None
        slices.append(
            ScheduleSlice(
                duration=duration,
                energy_amount=_number(s["energyAmount"], "EnergyAmount"),
                price=price,
            )
        )
    if "startTime" not in node:
        raise ValidationError("schedule missing startTime")
    return Schedule(
        schedule_id=_opt_int(node, "scheduleId") or 0,
        update_id=_opt_int(node, "updateId") or 0,
        start_time=_parse_datetime(node["startTime"], "startTime"),
        slices=tuple(slices),
        kind=kind,
    )


def serialize_schedule(schedule: Schedule) -> dict:
    node: dict[str, Any] = {
        "scheduleId": schedule.schedule_id,
        "updateId": schedule.update_id,
        "scheduleSlices": [
            _drop_none(
                {"duration": s.duration, "energyAmount": s.energy_amount, "price": s.price}
            )
            for s in schedule.slices
        ],
        "startTime": _fmt_datetime(schedule.start_time),
    }
    return node


# -- field helpers -----------------------------------------------------------

def _put(body: dict, key: str, value) -> None:
    if value is not None:
        body[key] = value


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def _first_key(entry: dict, candidates) -> str | None:
    for key in candidates:
        if key in entry:
            return key
    return None


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    return float(value)


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    return value


def _opt_int(body: dict, key: str) -> int | None:
    return _int(body[key], key) if key in body else None


def _opt_datetime(body: dict, key: str) -> datetime | None:
    return _parse_datetime(body[key], key) if key in body else None


def _parse_bounds_list(value, name: str) -> EnergyBounds:
    if not isinstance(value, list) or len(value) != 1 or not isinstance(value[0], dict):
        raise ValidationError(f"{name} must be a one-element list of bounds")
    item = value[0]
    if "lower" not in item or "upper" not in item:
        raise ValidationError(f"{name} bounds need lower and upper")
    return EnergyBounds(
        lower=_number(item["lower"], f"{name}.lower"),
        upper=_number(item["upper"], f"{name}.upper"),
    )


def _parse_price(node) -> PriceBounds | None:
    if node is None:
        return None
    if not isinstance(node, dict) or "minPrice" not in node or "maxPrice" not in node:
        raise ValidationError("priceConstraint needs minPrice and maxPrice")
    return PriceBounds(
        min_price=_number(node["minPrice"], "minPrice"),
        max_price=_number(node["maxPrice"], "maxPrice"),
    )


def _parse_matrix(value) -> tuple[tuple[float, float, float], ...]:
    if not isinstance(value, list) or not value:
        raise ValidationError("dependency constraint list must be a non-empty array")
    rows = []
    for row in value:
        if not isinstance(row, list) or len(row) != 3:
            raise ValidationError("dependency rows must be [a, b, c] triples")
        rows.append(tuple(_number(v, "dependency coefficient") for v in row))
    return tuple(rows)


def _parse_polynomials(value) -> tuple[tuple[float, ...], ...]:
    if not isinstance(value, list) or not value:
        raise ValidationError("uncertain constraint list must be a non-empty array")
    polys = []
    for p in value:
        if not isinstance(p, list) or not p:
            raise ValidationError("polynomials must be non-empty coefficient lists")
        polys.append(tuple(_number(c, "polynomial coefficient") for c in p))
    return tuple(polys)


# -- datetimes ---------------------------------------------------------------

_WIRE_DATETIME = "%Y-%m-%dT%H:%M:%S.%f%z"


def _parse_datetime(value, name: str) -> datetime:
    if not isinstance(value, str):
        raise ValidationError(f"{name} must be a datetime string")
    for fmt in (_WIRE_DATETIME, "%Y-%m-%dT%H:%M:%S%z"):
        try:
            return datetime.strptime(value, fmt).astimezone(timezone.utc)
        except ValueError:
            continue
    raise ValidationError(f"malformed datetime in {name}: {value!r}")


def _fmt_datetime(moment: datetime) -> str:
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    moment = moment.astimezone(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%S.") + f"{moment.microsecond // 1000:03d}+0000"


def _fmt_datetime_opt(moment: datetime | None) -> str | None:
    return None if moment is None else _fmt_datetime(moment)


# -- canonical JSON writer ---------------------------------------------------

def _fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    text = f"{x:.6f}".rstrip("0").rstrip(".")
    if text in ("-0", ""):
        text = "0"
    return text


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool))


def _scalar_text(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    return _fmt_number(v)


def _inline_ok(v) -> bool:
    if _is_scalar(v):
        return True
    if isinstance(v, dict):
        return all(_is_scalar(x) for x in v.values())
    if isinstance(v, list):
        return all(
            _is_scalar(x) or (isinstance(x, list) and all(_is_scalar(y) for y in x))
            for x in v
        ) or (len(v) == 1 and isinstance(v[0], dict) and _inline_ok(v[0]))
    return False


def _inline(v) -> str:
    if _is_scalar(v):
        return _scalar_text(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_inline(x)}" for k, x in v.items()) + "}"
    return "[" + ", ".join(_inline(x) for x in v) + "]"


def _dumps(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _inline_ok(value):
        return _inline(value)
    if isinstance(value, dict):
        parts = [
            f"{inner}{json.dumps(k)}: {_dumps(v, indent + 1)}" for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, list):
        parts = [f"{inner}{_dumps(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _scalar_text(value)
