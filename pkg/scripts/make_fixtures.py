#!/usr/bin/env python3
"""Regenerate the canonical fixture corpus under fixtures/.

Each message is assembled as a raw wire dict, pushed through the codec
(parse then serialize) and written in canonical form, so the files are
byte-stable against the serializer.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from flexkit.codec import parse_message, serialize_message  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

PRICE = {"minPrice": 0.03, "maxPrice": 0.15}

CORE = {
    "id": "4188a132-a937-4639-96cf-d8529fa78b86",
    "state": "offered",
    "stateReason": "FlexOffer Initialized",
    "creationInterval": 1726911,
    "offeredById": "harry@80060B5E0FD671D58243CE7162A6054719822955",
    "locationId": {
        "userLocation": {"longitude": 9.990595, "latitude": 57.012293}
    },
    "acceptanceBeforeInterval": 1726914,
    "assignmentBeforeInterval": 1726914,
    "startAfterInterval": 1726912,
    "startBeforeInterval": 1726920,
    "assignment": "obligatory",
    "acceptanceBeforeTime": "2019-04-02T16:30:00.000+0000",
    "assignmentBeforeTime": "2019-04-02T16:30:00.000+0000",
    "numSecondsPerInterval": 900,
    "startAfterTime": "2019-04-02T16:00:00.000+0000",
    "startBeforeTime": "2019-04-02T18:00:00.000+0000",
    "creationTime": "2019-04-02T15:45:00.000+0000",
    "correct": True,
}

SLICE_ENTRY = {
    "energyConstraintList": [{"lower": 0.303, "upper": 0.478}],
    "priceConstraint": PRICE,
    "minDuration": 1,
    "maxDuration": 1,
}

DEFAULT_SCHEDULE = {
    "scheduleId": 0,
    "updateId": 0,
    "scheduleSlices": [
        {"duration": 1, "energyAmount": 0.423, "price": 0.05},
        {"duration": 1, "energyAmount": 0.403, "price": 0.1},
        {"duration": 1, "energyAmount": 0.388, "price": 0.1},
        {"duration": 1, "energyAmount": 0.433, "price": 0.03},
        {"duration": 1, "energyAmount": 0.353, "price": 0.03},
        {"duration": 1, "energyAmount": 0.393, "price": 0.05},
        {"duration": 1, "energyAmount": 0.433, "price": 0.07},
        {"duration": 1, "energyAmount": 0.413, "price": 0.07},
    ],
    "startTime": "2019-04-02T00:00:00.000+0000",
}

DFO_MATRICES = [
    [[0, 1, 0.392], [0, -1, -0.324]],
    [[-1, 0, -0.324], [1, 0, 0.392], [-0.221, -1, -0.396], [0.221, 1, 0.514]],
    [[0, -1, -0.309], [0, 1, 0.442], [-1, 0, -0.648], [1, 0, 0.819],
     [-0.127, -1, -0.406], [0.127, 1, 0.531]],
    [[0, -1, -0.309], [0, 1, 0.442], [-1, 0, -0.972], [1, 0, 1.246],
     [-0.088, -1, -0.41], [0.088, 1, 0.537]],
]

UFO_POLYS = [
    [[1]],
    [[1], [-20.6, 66.67], [29.467, -66.67]],
]


def build_sfo():
    msg = dict(CORE)
    msg["flexOfferProfileConstraints"] = [dict(SLICE_ENTRY) for _ in range(8)]
    msg["defaultSchedule"] = DEFAULT_SCHEDULE
    return msg


def build_tecfo():
    msg = build_sfo()
    msg["flexOfferProfileConstraints"] = msg["flexOfferProfileConstraints"] + [
        {"TotalEnergyConstraints": [{"lower": 2.592, "upper": 3.381}]}
    ]
    return msg


def build_dfo():
    msg = dict(CORE)
    msg["flexOfferProfileConstraints"] = [
        {
            "DependencyEnergyConstraintList": rows,
            "priceConstraint": PRICE,
            "minDuration": 1,
            "maxDuration": 1,
        }
        for rows in DFO_MATRICES
    ]
    return msg


def build_ufo():
    msg = dict(CORE)
    entries = []
    for t, polys in enumerate(UFO_POLYS):
        entry = {"UncertainEnergyConstraintList": polys}
        if t == 0:
            # the constant polynomial carries no energy range of its own
            entry["energyConstraintList"] = [{"lower": 0.324, "upper": 0.392}]
        entry.update({"priceConstraint": PRICE, "minDuration": 1, "maxDuration": 1})
        entries.append(entry)
    msg["flexOfferProfileConstraints"] = entries
    return msg


def main():
    FIXTURES.mkdir(exist_ok=True)
    for name, builder in (
        ("sfo", build_sfo),
        ("tecfo", build_tecfo),
        ("dfo", build_dfo),
        ("ufo", build_ufo),
    ):
        raw = json.dumps({"flexOffer": builder()})
        canonical = serialize_message(parse_message(raw))
        path = FIXTURES / f"{name}.json"
        path.write_text(canonical, encoding="utf-8")
        print(f"wrote {path}")
    prices = FIXTURES / "prices.csv"
    prices.write_text(
        "price_eur_per_kwh\n0.05\n0.1\n0.1\n0.03\n0.03\n0.05\n0.07\n0.07\n",
        encoding="utf-8",
    )
    print(f"wrote {prices}")
    cfg = FIXTURES / "heatpump.cfg"
    cfg.write_text(
        "# running-example heat pump and room\n"
        "p_max = 4.6\n"
        "cop = 3.65\n"
        "wall_area = 12.0\n"
        "c_ht = 6.0\n"
        "t_out = 275.0\n"
        "t_min = 293.0\n"
        "t_max = 297.0\n"
        "t_init = 295.0\n"
        "thermal_capacitance = 2.0e7\n"
        "dt = 3600\n"
        "horizon = 8\n"
        "start_time = 2019-04-02T00:00:00\n",
        encoding="utf-8",
    )
    print(f"wrote {cfg}")


if __name__ == "__main__":
    main()
