"""Regenerate the bundled body files under src/matg/fixtures."""

from pathlib import Path

from matg import fixtures as fx
from matg import io as bio


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "src" / "matg" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    for name, build in fx.BODIES.items():
        bio.save(build(), out / f"{name}.json")
        print(f"wrote {name}.json")


if __name__ == "__main__":
    main()
