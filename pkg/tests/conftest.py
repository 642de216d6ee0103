from itertools import product

from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def naive_rooted_trees(n):
    """All rooted trees on 1..n as parent maps, by filtering every parent assignment."""
    for root in range(1, n + 1):
        others = [v for v in range(1, n + 1) if v != root]
        choices = [[p for p in range(1, n + 1) if p != v] for v in others]
        for combo in product(*choices):
            parent = dict(zip(others, combo))
            ok = True
            for v in others:
                seen, u = set(), v
                while u != root:
                    if u in seen:
                        ok = False
                        break
                    seen.add(u)
                    u = parent[u]
                if not ok:
                    break
            if ok:
                yield root, parent


def naive_profile(root, parent, n, top):
    """Out-degree counts (trimmed) of the subtree under ``top``."""
    children = {v: [] for v in range(1, n + 1)}
    for v, p in parent.items():
        children[p].append(v)
    counts = {}
    stack = [top]
    while stack:
        v = stack.pop()
        d = len(children[v])
        counts[d] = counts.get(d, 0) + 1
        stack.extend(children[v])
    return tuple(counts.get(j, 0) for j in range(max(counts) + 1))


def naive_twin_pairs(root, parent, n, k):
    profs = [naive_profile(root, parent, n, v) for v in range(1, n + 1) if v != root]
    return sum(1 for i, a in enumerate(profs) for j, b in enumerate(profs)
               if i != j and a == b and sum(a) == k)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}"
    if detail:
        line += f" :: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
