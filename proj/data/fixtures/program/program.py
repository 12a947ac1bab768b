"""Small inventory helpers."""

from typing import Dict, List


def _normalize(name: str) -> str:
    return name.strip().lower()


def total_units(counts: List[int]) -> int:
    """Sum of all unit counts, ignoring negatives."""
    total = 0
    for c in counts:
        if c > 0:
            total += c
    return total


def restock_needed(stock: Dict[str, int], threshold: int) -> List[str]:
    """Names whose stock is below the threshold, sorted."""
    low = []
    for name, qty in stock.items():
        if qty < threshold:
            low.append(_normalize(name))
    low.sort()
    return low


def apply_discount(price: float, percent: int) -> float:
    if percent <= 0:
        return price
    if percent >= 100:
        return 0.0
    factor = (100 - percent) / 100
    return round(price * factor, 2)


def merge_counts(a: Dict[str, int], b: Dict[str, int]) -> Dict[str, int]:
    merged = dict(a)
    for key, value in b.items():
        current = merged.get(key, 0)
        merged[key] = current + value
    return merged


if __name__ == "__main__":
    print(total_units([1, 2, 3]))
