from typing import Dict, Hashable, Iterable, List


class UnionFind:
    """Disjoint sets whose representative is always the smallest member."""

    def __init__(self, items: Iterable[Hashable]):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if y < x:
            x, y = y, x
        self.parent[y] = x

    def reps(self) -> List:
        return sorted(x for x in self.parent if self.parent[x] == x)

    def classes(self) -> Dict[Hashable, List]:
        """Representative -> sorted members, in representative order."""
        out: Dict[Hashable, List] = {rep: [] for rep in self.reps()}
        for x in sorted(self.parent):
            out[self.find(x)].append(x)
        return out

    def __len__(self) -> int:
        return len(self.reps())

