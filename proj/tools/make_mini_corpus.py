#!/usr/bin/env python3
"""Generate the synthetic mini-corpus under data/mini.

Everything here is fabricated: event rows, fatality counts and article text
are drawn from a fixed-seed generator so the output is identical on every run.
"""

import argparse
import csv
import datetime as dt
import gzip
import io
import json
import random
import zipfile
from pathlib import Path

COUNTRIES = [
    # name, iso3, monthly fatality profile keyed by (year, month)
    ("Sudan", "SDN"),
    ("Ethiopia", "ETH"),
    ("Somalia", "SOM"),
]

HISTORY_START = (2022, 1)
RANGE_END = (2023, 8)
GDELT_START = (2022, 10)

REGIONS = {
    "Sudan": ["Khartoum", "Darfur", "Kordofan", "Blue Nile"],
    "Ethiopia": ["Amhara", "Oromia", "Tigray", "Afar"],
    "Somalia": ["Banadir", "Hiraan", "Galmudug", "Lower Shabelle"],
}

ACTORS = {
    "Sudan": ["the army", "a paramilitary force", "armed militias"],
    "Ethiopia": ["federal forces", "regional militias", "an armed opposition group"],
    "Somalia": ["government troops", "an insurgent group", "clan militias"],
}

HOSTS = ["news.example.org", "wire.example.net", "daily.example.com"]


def months(start, end):
    y, m = start
    while (y, m) <= end:
        yield y, m
        m += 1
        if m == 13:
            y, m = y + 1, 1


def month_profile(name, y, m):
    idx = (y - 2022) * 12 + (m - 1)  # 0 = Jan 2022
    if name == "Sudan":
        base = [70, 80, 60, 90, 75, 85, 70, 95, 80, 90, 100, 85, 90, 110, 95]
        if idx < len(base):
            return base[idx]
        return [900, 1400, 1100, 800, 1000][min(idx - len(base), 4)]
    if name == "Ethiopia":
        if idx < 11:
            return 600 - idx * 15
        return max(60, 450 - (idx - 11) * 45)
    return 300 + (idx % 3) * 20  # Somalia: persistent, roughly flat


def days_in_month(y, m):
    nxt = dt.date(y + (m == 12), m % 12 + 1, 1)
    return (nxt - dt.date(y, m, 1)).days


def long_date(d):
    return f"{d.day} {d.strftime('%B')} {d.year}"


def write_acled(out, rng):
    rows = []
    counter = 0
    for name, _ in COUNTRIES:
        for y, m in months(HISTORY_START, RANGE_END):
            total = month_profile(name, y, m)
            n_events = rng.randint(4, 9)
            cuts = sorted(rng.sample(range(1, total), n_events - 1)) if total > n_events else []
            parts = [b - a for a, b in zip([0] + cuts, cuts + [total])] if cuts else [total] + [0] * (n_events - 1)
            for part in parts:
                day = rng.randint(1, days_in_month(y, m))
                counter += 1
                region = rng.choice(REGIONS[name])
                rows.append(
                    {
                        "event_id_cnty": f"{name[:3].upper()}{counter}",
                        "event_date": dt.date(y, m, day).isoformat(),
                        "year": str(y),
                        "event_type": rng.choice(["Battles", "Violence against civilians", "Explosions/Remote violence"]),
                        "country": name,
                        "admin1": region,
                        "fatalities": str(part),
                        "notes": f"Clashes in {region}, reported by local sources, with {part} deaths.",
                    }
                )
    rows.sort(key=lambda r: (r["event_date"], r["event_id_cnty"]))
    # Rows for a country outside the study set and deliberately broken rows.
    rows.insert(5, dict(rows[0], event_id_cnty="COD1", country="Congo, DRC", fatalities="4"))
    rows.insert(40, dict(rows[40], event_id_cnty="BAD1", fatalities="-3"))
    rows.insert(90, dict(rows[90], event_id_cnty="BAD2", event_date="2023-13-45"))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    (out / "acled.csv").write_text(buf.getvalue(), encoding="utf-8")


PARAGRAPHS = [
    "Residents described heavy gunfire in {region} as {actor} moved into several districts.",
    "Aid groups said access to the area remained limited and that clinics were running short of supplies.",
    "Local officials called for calm while community leaders attempted to negotiate a pause in the fighting.",
    "Analysts noted that the clashes followed weeks of rising tension over control of key roads and markets.",
    "Several families fled toward neighbouring towns, according to people who spoke by telephone.",
    "Observers said the situation could change quickly if reinforcements arrived from other regions.",
    "Humanitarian agencies appealed for safe corridors to reach civilians trapped by the violence.",
    "Prices for fuel and bread rose sharply in the affected districts, traders said.",
]


def article_html(name, region, actor, when, ident, rng, paragraphs):
    lead = (
        f"On {long_date(when)}, fighting between {actor} and rival forces was reported in {region}, {name}. "
        f"Report reference {ident}."
    )
    body = [lead] + [rng.choice(PARAGRAPHS).format(region=region, actor=actor) for _ in range(paragraphs)]
    ps = "\n".join(f"    <p>{p}</p>" for p in body)
    return f"""<!DOCTYPE html>
<html>
<head>
  <title>{name}: clashes reported in {region}</title>
  <script>var tracking = {{"page": "{ident}"}};</script>
  <style>body {{ font-family: serif; }}</style>
</head>
<body>
  <nav><a href="/">Home</a> | <a href="/world">World</a></nav>
  <article>
{ps}
  </article>
  <!-- related stories -->
  <footer>Copyright example news &amp; partners</footer>
</body>
</html>
"""


_next_event_id = [900000000]


def gdelt_row(date, a1, a2, goldstein, tone, url):
    _next_event_id[0] += 1
    cols = [""] * 61
    cols[0] = str(_next_event_id[0])
    cols[1] = date.strftime("%Y%m%d")
    cols[2] = date.strftime("%Y%m")
    cols[3] = str(date.year)
    cols[7] = a1
    cols[17] = a2
    cols[30] = f"{goldstein:.1f}"
    cols[34] = f"{tone:.6f}"
    cols[60] = url
    return "\t".join(cols)


def write_articles_and_gdelt(out, rng):
    snap = out / "snapshot"
    (snap / "pages").mkdir(parents=True, exist_ok=True)
    index_lines = []
    rows_2022, rows_2023 = [], []
    ident = 0
    for name, iso3 in COUNTRIES:
        for y, m in months(GDELT_START, RANGE_END):
            n_articles = 1 if (y, m) < (2023, 1) else rng.choice([1, 2])
            for _ in range(n_articles):
                ident += 1
                region = rng.choice(REGIONS[name])
                actor = rng.choice(ACTORS[name])
                when = dt.date(y, m, rng.randint(1, days_in_month(y, m)))
                host = HOSTS[ident % len(HOSTS)]
                url = f"https://{host}/{name.lower()}/{y}/{m:02d}/report-{ident}"
                page = f"pages/{ident:03d}.html"
                paragraphs = rng.randint(3, 16)
                (snap / page).write_text(
                    article_html(name, region, actor, when, f"MC-{ident:03d}", rng, paragraphs), encoding="utf-8"
                )
                index_lines.append(f"{url}\t200\t{page}")
                cites = [when] + [
                    min(when + dt.timedelta(days=rng.randint(0, 5)), dt.date(y, m, days_in_month(y, m)))
                    for _ in range(rng.randint(0, 2))
                ]
                # One story is cited again two months later, which keeps it out
                # of the context for the month in between.
                if ident == 20:
                    cites.append(dt.date(y + (m + 2 > 12), (m + 1) % 12 + 1, 10))
                for d in cites:
                    goldstein = -rng.choice([10.0, 9.0, 7.0, 5.0, 2.0, 0.0, 1.0])
                    tone = -rng.uniform(1.0, 9.0)
                    other = rng.choice(["", "", "USA", "EGY", "KEN", "UGA"])
                    a1, a2 = (iso3, other) if rng.random() < 0.7 else (other, iso3)
                    row = gdelt_row(d, a1, a2, goldstein, tone, url)
                    (rows_2022 if d.year == 2022 else rows_2023).append((d, row))
                    # Events from unrelated countries sharing the export.
                    if rng.random() < 0.3:
                        row = gdelt_row(d, "FRA", "DEU", 3.0, 1.5, f"https://other.example.org/{ident}")
                        (rows_2022 if d.year == 2022 else rows_2023).append((d, row))

    rows_2022.sort(key=lambda r: r[0])
    rows_2023.sort(key=lambda r: r[0])
    lines_2022 = [r for _, r in rows_2022]
    lines_2023 = [r for _, r in rows_2023]
    # Malformed rows: out-of-range Goldstein, truncated row, impossible date.
    lines_2023.insert(3, gdelt_row(dt.date(2023, 1, 5), "SDN", "", 11.0, -2.0, "https://news.example.org/bad"))
    lines_2023.insert(7, "123\t20230110\t202301")
    bad = gdelt_row(dt.date(2023, 2, 1), "ETH", "", -2.0, -2.0, "https://news.example.org/bad2").split("\t")
    bad[1] = "20230231"
    lines_2023.insert(11, "\t".join(bad))

    gdelt = out / "gdelt"
    gdelt.mkdir(exist_ok=True)
    payload = ("\n".join(lines_2022) + "\n").encode()
    (gdelt / "events-2022.export.CSV.gz").write_bytes(gzip.compress(payload, mtime=0))
    zbuf = io.BytesIO()
    with zipfile.ZipFile(zbuf, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        info = zipfile.ZipInfo("events-2023.export.CSV", date_time=(2023, 9, 1, 0, 0, 0))
        info.compress_type = zipfile.ZIP_DEFLATED
        zf.writestr(info, "\n".join(lines_2023) + "\n")
    (gdelt / "events-2023.export.CSV.zip").write_bytes(zbuf.getvalue())

    (snap / "index.tsv").write_text("# url\tstatus\tfile\n" + "\n".join(index_lines) + "\n", encoding="utf-8")
    return ident


def write_mock_and_config(out):
    script = {
        "rules": [
            {
                "country": "Sudan",
                "month": "2023-05",
                "experiment": "Rag",
                "purpose": "forecast",
                "reply": "TREND: Escalate\nFATALITIES: 1,200 to 1,500",
            },
            {
                "country": "Ethiopia",
                "month": "2023-07",
                "experiment": "*",
                "purpose": "forecast",
                "reply": "Fighting is easing.\nTREND: De-escalate\nFATALITIES: 150-250",
            },
            {
                "country": "Somalia",
                "experiment": "Rag",
                "purpose": "forecast",
                "reply": "TREND: Stable Conflict\nFATALITIES: 300",
            },
        ],
        "default": {"max_fatalities": 1500, "range_probability": 0.3},
    }
    (out / "mock_script.json").write_text(json.dumps(script, indent=2) + "\n", encoding="utf-8")
    config = {
        "run_id": "mini",
        "countries": [{"name": n, "iso3": c} for n, c in COUNTRIES],
        "date_range": {"start": "2023-01", "end": "2023-08"},
        "history_start": "2022-01",
        "experiment": "Both",
        "model_id": "mock-gpt-4",
        "seed": 20230501,
        "parallelism": 4,
        "provider": {"kind": "mock", "mock_script": "mock_script.json"},
        "cache": {"mode": "Off"},
        "labeling": {"window_months": 3, "peace_level": 25, "ratio_threshold": 0.25, "bins_k": 4},
        "retrieval": {
            "k": 12,
            "context_months": 3,
            "chunk_chars": 1200,
            "overlap_chars": 200,
            "embedder": {"kind": "hashing", "dims": 256},
            "summarizer": {"kind": "extractive", "char_budget": 1500},
        },
        "ingestion": {
            "gdelt_files": ["gdelt/events-2022.export.CSV.gz", "gdelt/events-2023.export.CSV.zip"],
            "acled_file": "acled.csv",
            "fetch_articles": True,
            "snapshot_dir": "snapshot",
            "fetch": {"concurrency": 4, "politeness_ms": 0},
        },
        "paths": {"data_dir": ".", "runs_dir": "../../runs"},
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "mini"))
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20230501)
    write_acled(out, rng)
    n = write_articles_and_gdelt(out, rng)
    write_mock_and_config(out)
    print(f"wrote {out} ({n} articles)")


if __name__ == "__main__":
    main()
