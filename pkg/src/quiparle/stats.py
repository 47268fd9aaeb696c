"""Corpus-level aggregation: per-outlet gender breakdowns and top sources.

Source identity across articles is plain lowercased string equality of the
representative names; no fuzzy merging, since identical names may well be
different people.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter


def _in_window(annotation, window) -> bool:
    if window is None:
        return True
    start, end = window
    if start is not None and annotation.published_at < start:
        return False
    if end is not None and annotation.published_at > end:
        return False
    return True


def _source_gender_counts(annotation, count_occurrences: bool) -> Counter:
    """Sources of one article bucketed by gender.

    Unique mode counts each person once per article; occurrence mode counts
    every attributed quote.
    """
    counts = Counter()
    if not count_occurrences:
        counts["women"] += len(annotation.women_sources)
        counts["men"] += len(annotation.men_sources)
        counts["other"] += len(annotation.other_sources)
        return counts
    women = {n.lower() for n in annotation.women_sources}
    men = {n.lower() for n in annotation.men_sources}
    other = {n.lower() for n in annotation.other_sources}
    for record in annotation.quotes:
        reference = record.get("reference", "").lower()
        if not reference:
            continue
        if reference in women:
            counts["women"] += 1
        elif reference in men:
            counts["men"] += 1
        elif reference in other:
            counts["other"] += 1
    return counts


def _ratio_row(organization, counts: Counter, articles: int) -> dict:
    total = counts["men"] + counts["women"] + counts["other"]
    return {
        "organization": organization,
        "men_pct": 100.0 * counts["men"] / total if total else 0.0,
        "women_pct": 100.0 * counts["women"] / total if total else 0.0,
        "other_pct": 100.0 * counts["other"] / total if total else 0.0,
        "articles": articles,
    }


def outlet_breakdown(annotations: list, window=None,
                     count_occurrences: bool = False) -> dict:
    """Percentages of men/women/other sources per outlet plus a totals row."""
    per_outlet = {}
    article_counts = Counter()
    overall = Counter()
    total_articles = 0
    for annotation in annotations:
        if not _in_window(annotation, window):
            continue
        counts = _source_gender_counts(annotation, count_occurrences)
        per_outlet.setdefault(annotation.outlet, Counter()).update(counts)
        article_counts[annotation.outlet] += 1
        overall.update(counts)
        total_articles += 1
    rows = [
        _ratio_row(outlet, per_outlet[outlet], article_counts[outlet])
        for outlet in sorted(per_outlet)
    ]
    total = _ratio_row("Total", overall, total_articles) if rows else None
    return {"rows": rows, "total": total}


def top_sources(annotations: list, month: str, k: int) -> dict:
    """Top-k men and women sources of one month, ranked by quote count.

    ``month`` is "YYYY-MM"; ties break alphabetically. Counts feed the
    downstream manual categorization, so they ride along with the names.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    counts = {"men": Counter(), "women": Counter()}
    display = {}
    for annotation in annotations:
        if annotation.published_at.strftime("%Y-%m") != month:
            continue
        women = {n.lower() for n in annotation.women_sources}
        men = {n.lower() for n in annotation.men_sources}
        for record in annotation.quotes:
            reference = record.get("reference", "")
            key = reference.lower()
            if not key:
                continue
            display.setdefault(key, reference)
            if key in women:
                counts["women"][key] += 1
            elif key in men:
                counts["men"][key] += 1
    out = {}
    for bucket, counter in counts.items():
        ranked = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
        out[bucket] = [(display[name], count) for name, count in ranked[:k]]
    return out


BREAKDOWN_HEADERS = ("Organization", "% Men", "% Women", "% Unknown/Other",
                     "Total articles")


def breakdown_to_csv(breakdown: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(BREAKDOWN_HEADERS)
    rows = list(breakdown["rows"])
    if breakdown["total"] is not None:
        rows.append(breakdown["total"])
    for row in rows:
        writer.writerow([
            row["organization"],
            f"{row['men_pct']:.1f}%",
            f"{row['women_pct']:.1f}%",
            f"{row['other_pct']:.1f}%",
            row["articles"],
        ])
    return buffer.getvalue()


def breakdown_to_json(breakdown: dict) -> str:
    return json.dumps(breakdown, ensure_ascii=False, indent=2)


def top_sources_to_csv(top: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(("Gender", "Source", "Quotes"))
    for bucket in ("men", "women"):
        for name, count in top[bucket]:
            writer.writerow((bucket, name, count))
    return buffer.getvalue()
