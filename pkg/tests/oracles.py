"""Reference implementations written straight from the textbook formulas.

Plain Python loops over lists; no code is shared with the package so a bug
in one route cannot hide in the other.
"""
from __future__ import annotations

import math
from collections import Counter


def entropy(values) -> float:
    n = len(values)
    h = 0.0
    for count in Counter(values).values():
        p = count / n
        h -= p * math.log2(p)
    return h


def conditional_entropy(attr, labels) -> float:
    n = len(attr)
    h = 0.0
    for v, count in Counter(attr).items():
        sub = [c for a, c in zip(attr, labels) if a == v]
        h += count / n * entropy(sub)
    return h


def info_gain(attr, labels) -> float:
    return entropy(labels) - conditional_entropy(attr, labels)


def gain_ratio(attr, labels) -> float:
    h = entropy(attr)
    if h == 0:
        return 0.0
    return info_gain(attr, labels) / h


def chi_square(attr, labels) -> float:
    n = len(attr)
    rows, cols = Counter(attr), Counter(labels)
    joint = Counter(zip(attr, labels))
    total = 0.0
    for a, ra in rows.items():
        for c, cc in cols.items():
            e = ra * cc / n
            if e > 0:
                total += (joint.get((a, c), 0) - e) ** 2 / e
    return total


def oner_merit(attr, labels) -> float:
    correct = 0
    for v in set(attr):
        counts = Counter(c for a, c in zip(attr, labels) if a == v)
        best = min(counts, key=lambda c: (-counts[c], c))
        correct += counts[best]
    return correct / len(attr)


def equal_frequency_bins(column, n_bins):
    """Bin index per value from cut points at the sorted positions floor(b*n/n_bins)-1."""
    v = sorted(column)
    n = len(v)
    cuts = []
    for b in range(1, n_bins):
        pos = (b * n) // n_bins - 1
        if pos >= 0 and v[pos] < v[-1] and v[pos] not in cuts:
            cuts.append(v[pos])
    cuts.sort()
    return [sum(1 for c in cuts if x > c) for x in column]


def relief(rows, labels, nominal, k=10):
    """ReliefF over list-of-lists rows; ``nominal`` flags columns compared by mismatch."""
    n, p = len(rows), len(rows[0])
    lo = [min(r[j] for r in rows) for j in range(p)]
    hi = [max(r[j] for r in rows) for j in range(p)]
    classes = sorted(set(labels))
    prior = {c: labels.count(c) / n for c in classes}

    def diff(j, a, b):
        if nominal[j]:
            return 0.0 if a[j] == b[j] else 1.0
        if hi[j] == lo[j]:
            return 0.0
        return abs(a[j] - b[j]) / (hi[j] - lo[j])

    def dist(a, b):
        s = 0.0
        for j in range(p):
            if nominal[j]:
                s += 0.0 if a[j] == b[j] else 1.0
            else:
                s += (a[j] - b[j]) ** 2
        return s

    w = [0.0] * p
    for i in range(n):
        others = sorted((dist(rows[i], rows[t]), t) for t in range(n) if t != i)
        for c in classes:
            group = [t for _, t in others if labels[t] == c][:k]
            if not group:
                continue
            for j in range(p):
                avg = sum(diff(j, rows[i], rows[t]) for t in group) / len(group)
                if c == labels[i]:
                    w[j] -= avg
                else:
                    w[j] += prior[c] / (1 - prior[labels[i]]) * avg
    return [x / n for x in w]


def softmax_loss(W, X, y, ridge):
    """Mean cross-entropy plus ridge/2 times the squared non-bias weights; W is K rows of p+1."""
    n = len(X)
    total = 0.0
    for row, c in zip(X, y):
        xb = list(row) + [1.0]
        z = [sum(wk[j] * xb[j] for j in range(len(xb))) for wk in W]
        m = max(z)
        lse = m + math.log(sum(math.exp(v - m) for v in z))
        total += lse - z[c]
    pen = sum(wk[j] ** 2 for wk in W for j in range(len(wk) - 1))
    return total / n + 0.5 * ridge * pen


def weighted_scores(cm):
    """(accuracy, weighted precision, weighted recall, weighted F1) from a list-of-lists matrix."""
    K = len(cm)
    total = sum(sum(r) for r in cm)
    acc = sum(cm[i][i] for i in range(K)) / total
    wp = wr = wf = 0.0
    for i in range(K):
        support = sum(cm[i])
        predicted = sum(cm[t][i] for t in range(K))
        p = cm[i][i] / predicted if predicted else 0.0
        r = cm[i][i] / support if support else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        wp += support / total * p
        wr += support / total * r
        wf += support / total * f
    return acc, wp, wr, wf
