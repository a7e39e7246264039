"""Regenerate the bundled synthetic degree series.

The curves imitate the broad 1970-2020 profile of national mathematics and
statistics degree production (a post-1970 decline, a trough in the 1980s,
growth after 2000, a statistics-driven rise in master's degrees). They are
smooth deterministic functions rounded to whole degrees, not real data.

    python scripts/make_sample_data.py > src/academic_pipeline/data/sample_degrees.csv
"""
import math
import sys


def main():
    out = sys.stdout
    out.write("year,bachelors,masters,doctorates\n")
    for year in range(1970, 2021):
        x = (year - 1970) / 50.0
        wiggle = math.sin(2.0 * math.pi * (year - 1970) / 7.0)
        bachelors = 24800.0 * (1.0 - 2.1 * x + 2.9 * x**2 - 0.55 * x**3) + 300.0 * wiggle
        masters = 5600.0 * (1.0 - 1.6 * x + 2.4 * x**2 + 0.5 * x**3) + 90.0 * wiggle
        doctorates = 1450.0 * (1.0 - 1.0 * x + 1.5 * x**2 + 0.5 * x**3) - 25.0 * wiggle
        out.write(f"{year},{round(bachelors)},{round(masters)},{round(doctorates)}\n")


if __name__ == "__main__":
    main()
