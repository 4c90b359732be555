"""Deterministic cache replacement policies as finite Mealy machines.

A policy of associativity n consumes inputs that either touch a cache line
(``0 <= i < n``, a hit on line i) or request a line to be freed (the
eviction request, encoded as ``n``).  On an eviction request it answers
with the index of the line to free; on a line touch it answers "no
eviction" (encoded as ``-1``).  Every well-formed policy satisfies those
two output constraints in every state, and both the transition and the
output function are total.

Machines are immutable after construction, so all operations here are pure
and safe to share across threads.

Textual rendering used by the JSON/DOT exports: inputs ``H0..H{n-1}`` and
``E``; outputs ``N`` and ``V0..V{n-1}``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

NO_EVICT = -1


class PolicyError(ValueError):
    """Structurally invalid machine, state id, or trace symbol."""


def hit_input(line: int) -> int:
    return line


def evict_input(assoc: int) -> int:
    return assoc


def format_input(inp: int, assoc: int) -> str:
    if inp == assoc:
        return "E"
    if 0 <= inp < assoc:
        return f"H{inp}"
    raise PolicyError(f"input {inp!r} out of range for associativity {assoc}")


def parse_input(text: str, assoc: int) -> int:
    if text == "E":
        return assoc
    if text.startswith("H"):
        try:
            line = int(text[1:])
        except ValueError:
            raise PolicyError(f"bad input symbol {text!r}") from None
        if 0 <= line < assoc:
            return line
    raise PolicyError(f"bad input symbol {text!r} for associativity {assoc}")


def format_output(out: int, assoc: int) -> str:
    if out == NO_EVICT:
        return "N"
    if 0 <= out < assoc:
        return f"V{out}"
    raise PolicyError(f"output {out!r} out of range for associativity {assoc}")


def parse_output(text: str, assoc: int) -> int:
    if text == "N":
        return NO_EVICT
    if text.startswith("V"):
        try:
            line = int(text[1:])
        except ValueError:
            raise PolicyError(f"bad output symbol {text!r}") from None
        if 0 <= line < assoc:
            return line
    raise PolicyError(f"bad output symbol {text!r} for associativity {assoc}")


@dataclass(frozen=True)
class Policy:
    """A complete deterministic Mealy machine over the policy alphabet.

    ``delta[s][a]`` is the successor state and ``lam[s][a]`` the output for
    state ``s`` and input ``a``, with ``a`` ranging over the n line touches
    followed by the eviction request.  States are ints ``0..num_states-1``
    and ``initial`` is always a valid state.
    """

    assoc: int
    delta: tuple[tuple[int, ...], ...]
    lam: tuple[tuple[int, ...], ...]
    initial: int = 0
    state_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.assoc < 1:
            raise PolicyError("associativity must be positive")
        m = len(self.delta)
        if m == 0 or len(self.lam) != m:
            raise PolicyError("delta and lam must cover the same nonempty state set")
        if not (0 <= self.initial < m):
            raise PolicyError("initial state out of range")
        width = self.assoc + 1
        for s in range(m):
            if len(self.delta[s]) != width or len(self.lam[s]) != width:
                raise PolicyError(f"state {s}: transition tables must have {width} entries")
            for a in range(width):
                t = self.delta[s][a]
                if not (0 <= t < m):
                    raise PolicyError(f"state {s}, input {a}: successor {t} out of range")
            for line in range(self.assoc):
                if self.lam[s][line] != NO_EVICT:
                    raise PolicyError(f"state {s}: touching line {line} must not evict")
            ev = self.lam[s][self.assoc]
            if not (0 <= ev < self.assoc):
                raise PolicyError(f"state {s}: eviction request must name a line, got {ev}")
        if self.state_names and len(self.state_names) != m:
            raise PolicyError("state_names length mismatch")

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def inputs(self) -> range:
        """All inputs: line touches 0..n-1 then the eviction request n."""
        return range(self.assoc + 1)

    @property
    def evict(self) -> int:
        """The eviction-request input symbol."""
        return self.assoc

    def name_of(self, state: int) -> str:
        if self.state_names:
            return self.state_names[state]
        return f"s{state}"


def step(policy: Policy, state: int, inp: int) -> tuple[int, int]:
    """One transition: returns (successor state, output)."""
    if not (0 <= state < policy.num_states):
        raise PolicyError(f"unknown state {state!r}")
    if not (0 <= inp <= policy.assoc):
        raise PolicyError(f"unknown input {inp!r} for associativity {policy.assoc}")
    return policy.delta[state][inp], policy.lam[state][inp]


def walk(policy: Policy, word) -> tuple[int, ...]:
    """Outputs produced by feeding the input word from the initial state."""
    s = policy.initial
    delta, lam = policy.delta, policy.lam
    out = []
    for a in word:
        out.append(lam[s][a])
        s = delta[s][a]
    return tuple(out)


def accepts_trace(policy: Policy, trace) -> bool:
    """Whether the (input, output) sequence is reproduced by the machine.

    The empty trace is accepted by every machine.
    """
    s = policy.initial
    for inp, out in trace:
        if not (0 <= inp <= policy.assoc):
            raise PolicyError(f"bad trace input {inp!r}")
        if out != NO_EVICT and not (0 <= out < policy.assoc):
            raise PolicyError(f"bad trace output {out!r}")
        if policy.lam[s][inp] != out:
            return False
        s = policy.delta[s][inp]
    return True


def reachable(policy: Policy) -> Policy:
    """Restriction to states reachable from the initial state, renumbered
    in BFS order (inputs visited in their natural order)."""
    order = [policy.initial]
    index = {policy.initial: 0}
    for s in order:
        for a in policy.inputs:
            t = policy.delta[s][a]
            if t not in index:
                index[t] = len(order)
                order.append(t)
    delta = tuple(
        tuple(index[policy.delta[s][a]] for a in policy.inputs) for s in order
    )
    lam = tuple(tuple(policy.lam[s][a] for a in policy.inputs) for s in order)
    names = tuple(policy.name_of(s) for s in order) if policy.state_names else ()
    return Policy(policy.assoc, delta, lam, 0, names)


def minimize(policy: Policy) -> Policy:
    """The unique minimal machine trace-equivalent to the reachable part.

    Plain partition refinement: states start grouped by their full output
    row and are split until successor blocks stabilise.  The result is
    renumbered canonically (BFS from the initial state).
    """
    p = reachable(policy)
    n_inputs = p.assoc + 1
    block = {}
    rows = {}
    for s in range(p.num_states):
        row = p.lam[s]
        if row not in rows:
            rows[row] = len(rows)
        block[s] = rows[row]
    while True:
        sigs = {}
        new_block = {}
        for s in range(p.num_states):
            sig = (block[s],) + tuple(block[p.delta[s][a]] for a in range(n_inputs))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[s] = sigs[sig]
        if len(sigs) == len(set(block.values())):
            break
        block = new_block
    reps = {}
    for s in range(p.num_states):
        reps.setdefault(block[s], s)
    quot_delta = {}
    quot_lam = {}
    for b, s in reps.items():
        quot_delta[b] = tuple(block[p.delta[s][a]] for a in range(n_inputs))
        quot_lam[b] = p.lam[s]
    init_b = block[0]
    order = [init_b]
    index = {init_b: 0}
    for b in order:
        for a in range(n_inputs):
            t = quot_delta[b][a]
            if t not in index:
                index[t] = len(order)
                order.append(t)
    delta = tuple(tuple(index[quot_delta[b][a]] for a in range(n_inputs)) for b in order)
    lam = tuple(quot_lam[b] for b in order)
    return Policy(p.assoc, delta, lam, 0)


def find_counterexample(p1: Policy, p2: Policy):
    """Shortest input word on which the two machines' outputs differ, or
    None when they are trace-equivalent.  Breadth-first search over the
    product of the machines."""
    if p1.assoc != p2.assoc:
        raise PolicyError(
            f"associativity mismatch: {p1.assoc} vs {p2.assoc}"
        )
    start = (p1.initial, p2.initial)
    seen = {start}
    queue = deque([(start, ())])
    inputs = tuple(p1.inputs)
    while queue:
        (s1, s2), word = queue.popleft()
        for a in inputs:
            if p1.lam[s1][a] != p2.lam[s2][a]:
                return word + (a,)
            nxt = (p1.delta[s1][a], p2.delta[s2][a])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (a,)))
    return None


def equivalent(p1: Policy, p2: Policy) -> bool:
    return find_counterexample(p1, p2) is None


def isomorphic(p1: Policy, p2: Policy) -> bool:
    """Equality of reachable parts up to state renaming."""
    a, b = reachable(p1), reachable(p2)
    return a.assoc == b.assoc and a.delta == b.delta and a.lam == b.lam


def to_json(policy: Policy) -> str:
    n = policy.assoc
    transitions = []
    for s in range(policy.num_states):
        for a in policy.inputs:
            transitions.append(
                {
                    "from": policy.name_of(s),
                    "input": format_input(a, n),
                    "output": format_output(policy.lam[s][a], n),
                    "to": policy.name_of(policy.delta[s][a]),
                }
            )
    doc = {
        "assoc": n,
        "states": [policy.name_of(s) for s in range(policy.num_states)],
        "initial": policy.name_of(policy.initial),
        "transitions": transitions,
    }
    return json.dumps(doc, indent=2)


def from_json(text: str) -> Policy:
    try:
        doc = json.loads(text)
        n = int(doc["assoc"])
        names = list(doc["states"])
        initial = names.index(doc["initial"])
        index = {name: i for i, name in enumerate(names)}
        width = n + 1
        delta = [[None] * width for _ in names]
        lam = [[None] * width for _ in names]
        for t in doc["transitions"]:
            s = index[t["from"]]
            a = parse_input(t["input"], n)
            delta[s][a] = index[t["to"]]
            lam[s][a] = parse_output(t["output"], n)
    except PolicyError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise PolicyError(f"malformed policy document: {exc}") from None
    for s, name in enumerate(names):
        if None in delta[s] or None in lam[s]:
            raise PolicyError(f"state {name!r}: missing transitions")
    return Policy(
        n,
        tuple(tuple(row) for row in delta),
        tuple(tuple(row) for row in lam),
        initial,
        tuple(names),
    )


def to_dot(policy: Policy) -> str:
    n = policy.assoc
    lines = ["digraph policy {", "  rankdir=LR;", '  __start [shape=point, label=""];']
    lines.append(f'  __start -> "{policy.name_of(policy.initial)}";')
    for s in range(policy.num_states):
        lines.append(f'  "{policy.name_of(s)}" [shape=circle];')
    for s in range(policy.num_states):
        by_edge = {}
        for a in policy.inputs:
            label = f"{format_input(a, n)}/{format_output(policy.lam[s][a], n)}"
            by_edge.setdefault(policy.delta[s][a], []).append(label)
        for t, labels in by_edge.items():
            text = ", ".join(labels)
            lines.append(f'  "{policy.name_of(s)}" -> "{policy.name_of(t)}" [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
