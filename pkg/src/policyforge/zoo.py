"""Reference replacement policies, built as explicit Mealy machines.

Each policy is written as a small update function over a compact internal
state encoding (a recency stack, a bit per line, tree bits, or per-line
ages) and then unfolded into an explicit machine by reachability
exploration.  Exploration refuses to enumerate beyond ``STATE_CAP``
states.

Tie-breaking everywhere: when several lines qualify, the lowest index
wins.
"""

from __future__ import annotations

from .policy import NO_EVICT, Policy, PolicyError

STATE_CAP = 10**6

POLICY_KINDS = (
    "FIFO",
    "LRU",
    "PLRU",
    "MRU",
    "LIP",
    "SRRIP-HP",
    "SRRIP-FP",
    "New1",
    "New2",
)


def explore(assoc: int, initial, update, cap: int = STATE_CAP) -> Policy:
    """Unfold an update function ``update(state, inp) -> (state', output)``
    into an explicit machine over the states reachable from ``initial``."""
    index = {initial: 0}
    order = [initial]
    delta = []
    lam = []
    n_inputs = assoc + 1
    i = 0
    while i < len(order):
        s = order[i]
        drow = []
        lrow = []
        for a in range(n_inputs):
            t, out = update(s, a)
            if t not in index:
                if len(order) >= cap:
                    raise PolicyError(
                        f"policy exploration exceeded {cap} states; refusing to enumerate"
                    )
                index[t] = len(order)
                order.append(t)
            drow.append(index[t])
            lrow.append(out)
        delta.append(tuple(drow))
        lam.append(tuple(lrow))
        i += 1
    return Policy(assoc, tuple(delta), tuple(lam), 0)


def _fifo(assoc):
    def update(counter, inp):
        if inp < assoc:
            return counter, NO_EVICT
        return (counter + 1) % assoc, counter

    return 0, update


def _lru(assoc, insert_at_front):
    """Recency stack, most recent first.  LRU inserts the missed block at
    the front; LIP leaves it in the least-recent position."""

    def touch(stack, line):
        return (line,) + tuple(x for x in stack if x != line)

    def update(stack, inp):
        if inp < assoc:
            return touch(stack, inp), NO_EVICT
        victim = stack[-1]
        if insert_at_front:
            return touch(stack, victim), victim
        return stack, victim

    # Content is filled in line order, so line 0 holds the oldest block.
    initial = tuple(range(assoc - 1, -1, -1))
    return initial, update


def _mru(assoc):
    """One bit per line; touching a line sets its bit, and when the last
    zero bit disappears every other bit is cleared.  Eviction picks the
    lowest-indexed zero bit.  The all-zero vector is what an empty cache
    starts from; filling it leaves only the last line's bit set, which is
    the initial state used here."""

    def access(bits, line):
        bits = bits[:line] + (1,) + bits[line + 1 :]
        if all(bits):
            bits = tuple(1 if i == line else 0 for i in range(assoc))
        return bits

    def update(bits, inp):
        if inp < assoc:
            return access(bits, inp), NO_EVICT
        victim = bits.index(0)
        return access(bits, victim), victim

    initial = (0,) * assoc
    for line in range(assoc):
        initial = access(initial, line)
    return initial, update


def _plru(assoc):
    """Tree PLRU: one pointer bit per internal node (heap layout, bit 0 =
    left).  The victim is found by following the pointers; every access
    flips the bits on its path to point away from the accessed line."""
    if assoc & (assoc - 1) or assoc < 2:
        raise PolicyError(f"PLRU needs a power-of-two associativity, got {assoc}")
    internal = assoc - 1

    def victim_of(bits):
        node = 0
        while node < internal:
            node = 2 * node + 1 + bits[node]
        return node - internal

    def access(bits, line):
        bits = list(bits)
        node = internal + line
        while node > 0:
            parent = (node - 1) // 2
            bits[parent] = 1 if node == 2 * parent + 1 else 0
            node = parent
        return tuple(bits)

    def update(bits, inp):
        if inp < assoc:
            return access(bits, inp), NO_EVICT
        victim = victim_of(bits)
        return access(bits, victim), victim

    return (0,) * internal, update


def _srrip(assoc, hit_promotes_to_zero, ages=4):
    """Static re-reference interval prediction with ``ages`` age values.

    Lines carry an age in 0..ages-1; everything starts at the maximum
    (distant) age.  A miss ages all lines until some line is at the
    maximum, evicts the leftmost such line and inserts at maximum-1.  A
    hit either resets the line's age to 0 (hit priority) or decrements it
    (frequency priority).
    """
    if ages < 2:
        raise PolicyError("SRRIP needs at least 2 ages")
    top = ages - 1

    def update(vec, inp):
        if inp < assoc:
            a = vec[inp]
            new = 0 if hit_promotes_to_zero else max(a - 1, 0)
            return vec[:inp] + (new,) + vec[inp + 1 :], NO_EVICT
        gap = top - max(vec)
        aged = tuple(a + gap for a in vec)
        victim = aged.index(top)
        return aged[:victim] + (top - 1,) + aged[victim + 1 :], victim

    return (top,) * assoc, update


def _aged_until_full(vec, skip):
    """Raise every age except ``skip`` until some line reaches age 3
    (bounded to len(vec) passes, as the normalisation loop is written)."""
    vec = list(vec)
    for _ in range(len(vec)):
        if 3 not in vec:
            for i in range(len(vec)):
                if i != skip:
                    vec[i] += 1
    return tuple(vec)


def _aged_all_until_full(vec):
    vec = list(vec)
    for _ in range(len(vec)):
        if 3 not in vec:
            for i in range(len(vec)):
                vec[i] += 1
    return tuple(vec)


def _new1(assoc):
    if assoc != 4:
        raise PolicyError("New1 is only defined for associativity 4")

    def update(vec, inp):
        if inp < assoc:
            vec = vec[:inp] + (0,) + vec[inp + 1 :]
            return _aged_until_full(vec, inp), NO_EVICT
        victim = vec.index(3)
        vec = vec[:victim] + (1,) + vec[victim + 1 :]
        return _aged_until_full(vec, victim), victim

    return (3, 3, 3, 0), update


def _new2(assoc):
    if assoc != 4:
        raise PolicyError("New2 is only defined for associativity 4")

    def update(vec, inp):
        if inp < assoc:
            a = vec[inp]
            new = 0 if a == 1 else (1 if a > 1 else a)
            vec = vec[:inp] + (new,) + vec[inp + 1 :]
            return _aged_all_until_full(vec), NO_EVICT
        victim = vec.index(3)
        vec = vec[:victim] + (1,) + vec[victim + 1 :]
        return _aged_all_until_full(vec), victim

    return (3, 3, 3, 3), update


def build_policy(kind: str, assoc: int, ages: int = 4) -> Policy:
    """Explicit reference machine for a named policy.

    ``ages`` only affects the SRRIP variants (default 4, i.e. 2-bit ages).
    PLRU needs a power-of-two associativity; New1/New2 are fixed to
    associativity 4.
    """
    if assoc < 1:
        raise PolicyError(f"bad associativity {assoc}")
    key = kind.strip().upper().replace("_", "-")
    if key == "FIFO":
        initial, update = _fifo(assoc)
    elif key == "LRU":
        initial, update = _lru(assoc, insert_at_front=True)
    elif key == "LIP":
        initial, update = _lru(assoc, insert_at_front=False)
    elif key == "MRU":
        initial, update = _mru(assoc)
    elif key == "PLRU":
        initial, update = _plru(assoc)
    elif key == "SRRIP-HP":
        initial, update = _srrip(assoc, hit_promotes_to_zero=True, ages=ages)
    elif key == "SRRIP-FP":
        initial, update = _srrip(assoc, hit_promotes_to_zero=False, ages=ages)
    elif key == "NEW1":
        initial, update = _new1(assoc)
    elif key == "NEW2":
        initial, update = _new2(assoc)
    else:
        raise PolicyError(f"unknown policy kind {kind!r} (known: {', '.join(POLICY_KINDS)})")
    return explore(assoc, initial, update)
