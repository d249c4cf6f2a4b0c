#!/usr/bin/env python3
"""Independent reference computation of the expected pipeline outputs.

Reads the committed input fixtures and recomputes every published number the
dumb, straight-line way — no shared code with the C++ tree. The arithmetic
follows the documented operation order exactly (sums in file order, two-pass
correlation, elementwise (v-min)/(max-min)), so the expected values are
bit-exact doubles, not approximations.

Run from the repository root after make_fixtures.py:

    python3 tests/oracle/compute_golden.py

Outputs (committed):
    tests/fixtures/golden/scores.csv
    tests/fixtures/golden/augmented.geojson
    tests/fixtures/golden/report.json          (generated_at is a placeholder)
    tests/fixtures/golden/aggregates_30rows.json
"""

import csv
import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIX = ROOT / "tests" / "fixtures"
GOLD = FIX / "golden"

MARKET_PATH = "tests/fixtures/golden/market.tsv"
SVI_PATH = "tests/fixtures/golden/svi.csv"
GEOJSON_PATH = "tests/fixtures/golden/counties.geojson"

MARKET_REASONS = [
    "wrong_field_count", "region_type_not_county", "property_type_filtered",
    "bad_region", "bad_date", "inverted_period", "missing_growth_field",
    "invalid_growth_value",
]
SVI_REASONS = [
    "wrong_field_count", "bad_fips", "unknown_state", "bad_county_name",
    "fips_state_mismatch", "invalid_svi_value", "svi_missing_sentinel",
    "svi_out_of_range",
]

WS = " \t\r\n"


def load_states():
    with open(ROOT / "data" / "state_fips.csv", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["postal", "fips", "name"]
    return {postal: fips for postal, fips, _name in rows[1:]}


def ascii_lower(s):
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in s)


def canon(raw):
    """Lowercase, trim, strip trailing ' county'/' parish' tokens to a fixed point."""
    name = ascii_lower(raw.strip(WS))
    stripped = True
    while stripped and name:
        stripped = False
        for word in ("county", "parish"):
            if name == word:
                name = ""
                stripped = True
                break
            if len(name) > len(word) + 1 and name.endswith(" " + word):
                name = name[: -(len(word) + 1)]
                stripped = True
                break
        name = name.rstrip(" \t")
    return name or None


def parse_region(region, xw):
    comma = region.rfind(",")
    if comma < 0:
        return None
    state = region[comma + 1:].strip(WS)
    if len(state) != 2 or not (state.isascii() and state.isalpha()):
        return None
    fips = xw.get(state.upper())
    if fips is None:
        return None
    name = canon(region[:comma])
    if name is None:
        return None
    return (fips, name)


def parse_date(s):
    s = s.strip(WS)
    if len(s) != 10 or s[4] != "-" or s[7] != "-":
        return None
    for i in (0, 1, 2, 3, 5, 6, 8, 9):
        if not s[i].isdigit():
            return None
    y, m, d = int(s[0:4]), int(s[5:7]), int(s[8:10])
    if not 1 <= m <= 12:
        return None
    days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31][m - 1]
    if m == 2 and (y % 4 == 0 and y % 100 != 0 or y % 400 == 0):
        days = 29
    if not 1 <= d <= days:
        return None
    return (y, m, d)


def parse_finite(cell):
    cell = cell.strip(WS)
    if cell.startswith("+"):
        return None
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def ingest_market(path, property_filter="All Residential"):
    lines = (ROOT / path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header = lines[0].split("\t")
    col = {name.strip(WS): i for i, name in enumerate(header)}
    used = ["period_begin", "period_end", "region", "property_type",
            "homes_sold_mom", "homes_sold_yoy", "median_sale_price_mom",
            "median_sale_price_yoy"]
    if "region_type" in col:
        used.append("region_type")
    need = max(col[c] for c in used) + 1

    report = {"rows_read": 0, "rows_kept": 0,
              "dropped": {r: 0 for r in MARKET_REASONS}}
    records = []
    for line in lines[1:]:
        if line == "":
            continue
        report["rows_read"] += 1
        f = line.split("\t")

        def drop(reason):
            report["dropped"][reason] += 1

        if len(f) < need:
            drop("wrong_field_count")
            continue
        if "region_type" in col and f[col["region_type"]].strip(WS) != "county":
            drop("region_type_not_county")
            continue
        if f[col["property_type"]].strip(WS) != property_filter:
            drop("property_type_filtered")
            continue
        region = f[col["region"]].strip(WS)
        comma = region.rfind(",")
        region_ok = region != "" and comma >= 0
        if region_ok:
            state = region[comma + 1:].strip(WS)
            region_ok = (len(state) == 2 and state.isascii() and state.isalpha()
                         and region[:comma].strip(WS) != "")
        if not region_ok:
            drop("bad_region")
            continue
        begin = parse_date(f[col["period_begin"]])
        end = parse_date(f[col["period_end"]])
        if begin is None or end is None:
            drop("bad_date")
            continue
        if begin > end:
            drop("inverted_period")
            continue
        growth_cols = ["homes_sold_mom", "homes_sold_yoy",
                       "median_sale_price_mom", "median_sale_price_yoy"]
        if any(f[col[c]].strip(WS) == "" for c in growth_cols):
            drop("missing_growth_field")
            continue
        values = [parse_finite(f[col[c]]) for c in growth_cols]
        if any(v is None for v in values):
            drop("invalid_growth_value")
            continue
        report["rows_kept"] += 1
        records.append({
            "region": f[col["region"]],
            "hs_mom": values[0], "hs_yoy": values[1],
            "msp_mom": values[2], "msp_yoy": values[3],
        })
    return records, report


def aggregate(records, xw):
    """Per-county running sums in file order, then one division per field."""
    records_in = 0
    region_unparsed = 0
    sums = {}
    for r in records:
        records_in += 1
        key = parse_region(r["region"], xw)
        if key is None:
            region_unparsed += 1
            continue
        s = sums.setdefault(key, [0, 0.0, 0.0, 0.0, 0.0])
        s[0] += 1
        s[1] += r["msp_yoy"]
        s[2] += r["msp_mom"]
        s[3] += r["hs_yoy"]
        s[4] += r["hs_mom"]
    aggregates = []
    for key in sorted(sums):
        n, pyoy, pmom, hyoy, hmom = sums[key]
        aggregates.append({
            "key": key, "n_months": n,
            "avg_price_yoy": pyoy / n, "avg_price_mom": pmom / n,
            "avg_homes_sold_yoy": hyoy / n, "avg_homes_sold_mom": hmom / n,
        })
    return aggregates, {"records": records_in, "region_unparsed": region_unparsed}


def ingest_svi(path, xw):
    with open(ROOT / path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    header = [h.strip(WS) for h in rows[0]]
    col = {name: i for i, name in enumerate(header)}
    need = max(col[c] for c in ["FIPS", "ST_ABBR", "COUNTY", "RPL_THEMES"]) + 1

    report = {"rows_read": 0, "rows_kept": 0, "dropped": {r: 0 for r in SVI_REASONS}}
    records = []
    seen = set()
    for f in rows[1:]:
        if not f:
            continue
        report["rows_read"] += 1

        def drop(reason):
            report["dropped"][reason] += 1

        if len(f) < need:
            drop("wrong_field_count")
            continue
        fips = f[col["FIPS"]].strip(WS)
        if len(fips) != 5 or not (fips.isascii() and fips.isdigit()):
            drop("bad_fips")
            continue
        state = xw.get(f[col["ST_ABBR"]].strip(WS).upper())
        if state is None:
            drop("unknown_state")
            continue
        county = canon(f[col["COUNTY"]])
        if county is None:
            drop("bad_county_name")
            continue
        if fips[:2] != state:
            drop("fips_state_mismatch")
            continue
        v = parse_finite(f[col["RPL_THEMES"]])
        if v is None:
            drop("invalid_svi_value")
            continue
        if v == -999.0:
            drop("svi_missing_sentinel")
            continue
        if v < 0.0 or v > 1.0:
            drop("svi_out_of_range")
            continue
        assert fips not in seen, f"duplicate FIPS {fips}"
        seen.add(fips)
        report["rows_kept"] += 1
        records.append({"fips": fips, "key": (state, county), "svi": v})
    return records, report


def pearson(xs, ys):
    n = len(xs)
    sx = 0.0
    sy = 0.0
    for i in range(n):
        sx += xs[i]
        sy += ys[i]
    mx = sx / float(n)
    my = sy / float(n)
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for i in range(n):
        dx = xs[i] - mx
        dy = ys[i] - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    assert sxx != 0.0 and syy != 0.0
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def interpret(r):
    a = abs(r)
    if a < 0.2:
        return "negligible"
    if a < 0.4:
        return "weak"
    if a < 0.6:
        return "moderate"
    if a < 0.8:
        return "strong"
    return "very strong"


def field_summary(values):
    total = 0.0
    for v in values:
        total += v
    sv = sorted(values)
    n = len(sv)
    median = sv[n // 2] if n % 2 else (sv[n // 2 - 1] + sv[n // 2]) / 2.0
    return {"max": sv[-1], "mean": total / float(n), "median": median, "min": sv[0]}


def key_json(key):
    return {"county": key[1], "state_fips": key[0]}


def main():
    xw = load_states()

    # 30-row aggregate golden
    records30, _ = ingest_market("tests/fixtures/market_30rows.tsv")
    aggs30, _ = aggregate(records30, xw)
    out30 = [{"state_fips": a["key"][0], "county": a["key"][1],
              "n_months": a["n_months"], "avg_price_yoy": a["avg_price_yoy"],
              "avg_price_mom": a["avg_price_mom"],
              "avg_homes_sold_yoy": a["avg_homes_sold_yoy"],
              "avg_homes_sold_mom": a["avg_homes_sold_mom"]} for a in aggs30]
    (GOLD / "aggregates_30rows.json").write_text(
        json.dumps(out30, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    # full pipeline goldens
    records, market_report = ingest_market(MARKET_PATH)
    aggregates, agg_report = aggregate(records, xw)
    svi_records, svi_report = ingest_svi(SVI_PATH, xw)

    min_months = 12
    kept = [a for a in aggregates if a["n_months"] >= min_months]
    below = [a for a in aggregates if a["n_months"] < min_months]

    svi_by_key = {r["key"]: r for r in svi_records}
    joined = []
    market_only = []
    for a in kept:  # kept is key-sorted
        if a["key"] in svi_by_key:
            joined.append((a, svi_by_key[a["key"]]))
        else:
            market_only.append(a["key"])
    joined_keys = {a["key"] for a, _ in joined}
    svi_only = sorted(k for k in svi_by_key if k not in joined_keys)
    assert joined, "empty join"

    growth = [a["avg_price_yoy"] for a, _ in joined]
    lo = min(growth)
    hi = max(growth)
    norm = [0.5] * len(growth) if lo == hi else [(v - lo) / (hi - lo) for v in growth]

    w_growth = 0.5
    w_resilience = 0.5
    scores = []
    for i, (a, s) in enumerate(joined):
        res = 1.0 - s["svi"]
        score = w_growth * norm[i] + w_resilience * res
        scores.append({
            "key": a["key"], "growth_raw": growth[i], "growth_norm": norm[i],
            "svi": s["svi"], "resilience": res, "score": score,
            "score_viz": 1.0 - score,
        })
    scores.sort(key=lambda s: (-s["score"], s["key"]))

    xs = [s["svi"] for _, s in joined]
    ys = growth
    r = pearson(xs, ys)
    correlation = {"interpretation": interpret(r), "n": len(xs), "r": r}

    summary = {
        "count": len(scores),
        "growth_raw": field_summary([s["growth_raw"] for s in scores]),
        "score": field_summary([s["score"] for s in scores]),
    }

    # scores.csv
    lines = ["state_fips,county,growth_raw,growth_norm,svi,resilience,score,score_viz"]
    for s in scores:
        lines.append(",".join([
            s["key"][0], s["key"][1],
            f"{s['growth_raw']:.6f}", f"{s['growth_norm']:.6f}", f"{s['svi']:.6f}",
            f"{s['resilience']:.6f}", f"{s['score']:.6f}", f"{s['score_viz']:.6f}",
        ]))
    (GOLD / "scores.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # augmented geojson
    doc = json.loads((ROOT / GEOJSON_PATH).read_text(encoding="utf-8"))
    feature_keys = []
    for f in doc["features"]:
        p = f.get("properties") if isinstance(f, dict) else None
        key = None
        if isinstance(p, dict):
            st, nm = p.get("STATE"), p.get("NAME")
            if isinstance(st, str) and isinstance(nm, str):
                st = st.strip(WS)
                nm = canon(nm)
                if len(st) == 2 and nm is not None:
                    key = (st, nm)
        feature_keys.append(key)
    by_key = {}
    for i, k in enumerate(feature_keys):
        if k is not None:
            by_key.setdefault(k, []).append(i)

    matched = 0
    matched_features = set()
    unmatched_scores = []
    for s in scores:
        idxs = by_key.get(s["key"])
        if not idxs:
            unmatched_scores.append(s["key"])
            continue
        assert len(idxs) == 1, f"ambiguous match {s['key']}"
        doc["features"][idxs[0]]["properties"]["investment_score"] = s["score_viz"]
        matched_features.add(idxs[0])
        matched += 1
    unmatched_features = [i for i in range(len(doc["features"]))
                          if i not in matched_features]
    unmatched_scores.sort()
    (GOLD / "augmented.geojson").write_text(
        json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8")

    # report.json (generated_at is compared modulo value)
    report = {
        "aggregation": {
            "below_min_months": len(below),
            "counties": len(kept),
            "records": agg_report["records"],
            "region_unparsed": agg_report["region_unparsed"],
        },
        "config": {
            "min_months": min_months,
            "property_type": "All Residential",
            "score_property": "investment_score",
            "viz_invert": True,
            "weights": {"growth": w_growth, "resilience": w_resilience},
        },
        "correlation": correlation,
        "generated_at": "1970-01-01T00:00:00Z",
        "geojson_match": {
            "matched": matched,
            "unmatched_features": unmatched_features,
            "unmatched_scores": [key_json(k) for k in unmatched_scores],
        },
        "inputs": {"geojson": GEOJSON_PATH, "market": MARKET_PATH, "svi": SVI_PATH},
        "join": {
            "market_only": [key_json(k) for k in market_only],
            "scored": len(joined),
            "svi_only": [key_json(k) for k in svi_only],
        },
        "market_ingest": {
            "dropped": market_report["dropped"],
            "rows_kept": market_report["rows_kept"],
            "rows_read": market_report["rows_read"],
            "source": MARKET_PATH,
        },
        "summary": summary,
        "svi_ingest": {
            "dropped": svi_report["dropped"],
            "rows_kept": svi_report["rows_kept"],
            "rows_read": svi_report["rows_read"],
            "source": SVI_PATH,
        },
    }
    (GOLD / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8")

    print(f"market: read {market_report['rows_read']} kept {market_report['rows_kept']}")
    print(f"svi: read {svi_report['rows_read']} kept {svi_report['rows_kept']}")
    print(f"aggregated {len(aggregates)} counties, scored {len(scores)}")
    print(f"r = {r!r} ({correlation['interpretation']}), n = {correlation['n']}")
    print(f"geojson: matched {matched}, unmatched features {unmatched_features}")
    top = scores[0]
    print(f"top: {top['key']} score {top['score']!r}")


if __name__ == "__main__":
    main()
