"""Driving, recording, and judging executions of the shared-list structure.

A schedule names which process takes the next machine step.  Replaying the
same (workload, schedule) pair is bit-identical, so histories double as
golden regression artifacts.  A history is a flat list of JSON-able events:

* ``invoke``   a process starts its next search,
* ``access``   one shared-memory access (read or compare-and-swap),
* ``respond``  the search returns, with the number of nodes it inspected.

Linearization follows the front-of-list rule: every completed search that
returns a node is placed at an event where that node was at the front of
the list, inside the search's own interval; searches for absent items may
sit anywhere in their interval.  Concurrent searches resolved by the same
move-to-front land on the same event and are ordered with the mover first.

Cost accounting happens at three granularities: the cost of sequential
move-to-front on the linearized sequence (operation level), the sum of node
inspections over all searches (item access level), and the raw count of
shared-memory accesses (actual).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from . import dmtf
from .dmtf import NOT_PRESENT, ProcessRun, SharedState
from .merges import Merge
from .seqcore import CostModel, mtf_run, opt_free_cost, opt_paid_cost

Workload = Sequence[Sequence[int]]


@dataclass
class Schedule:
    """How to pick the next process: an explicit pid list or a generator.

    Kinds: ``explicit`` (replay ``pids`` verbatim), ``round_robin``,
    ``random`` (seeded, among processes with pending work), ``sequential``
    (each operation runs to completion, ordered by ``merge`` or by plain
    concatenation).
    """

    kind: str = "round_robin"
    pids: Optional[Sequence[int]] = None
    seed: Optional[int] = None
    merge: Optional[Merge] = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.pids is not None:
            out["pids"] = list(self.pids)
        if self.seed is not None:
            out["seed"] = self.seed
        if self.merge is not None:
            out["merge"] = self.merge.to_json()
        return out

    @staticmethod
    def from_json(data) -> "Schedule":
        if isinstance(data, list):
            return Schedule(kind="explicit", pids=[int(x) for x in data])
        return Schedule(
            kind=data["kind"],
            pids=data.get("pids"),
            seed=data.get("seed"),
            merge=Merge.from_json(data["merge"]) if "merge" in data else None,
        )


@dataclass
class ExecutionHistory:
    p: int
    phi: int
    items: tuple[int, ...]
    workload: tuple[tuple[int, ...], ...]
    events: list[dict]
    schedule: list[int]
    completed: bool

    def accesses(self) -> list[dict]:
        return [e for e in self.events if e["type"] == "access"]

    def to_jsonl(self) -> str:
        meta = {
            "type": "meta",
            "p": self.p,
            "phi": self.phi,
            "items": list(self.items),
            "workload": [list(w) for w in self.workload],
            "schedule": self.schedule,
            "completed": self.completed,
        }
        lines = [json.dumps(meta, sort_keys=True)]
        lines.extend(json.dumps(e, sort_keys=True) for e in self.events)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "ExecutionHistory":
        lines = [json.loads(l) for l in text.splitlines() if l.strip()]
        meta = lines[0]
        return ExecutionHistory(
            p=meta["p"],
            phi=meta["phi"],
            items=tuple(meta["items"]),
            workload=tuple(tuple(w) for w in meta["workload"]),
            events=lines[1:],
            schedule=list(meta["schedule"]),
            completed=meta["completed"],
        )


class _Driver:
    """Steps processes through their request sequences, recording events."""

    def __init__(self, state: SharedState, workload: Workload):
        if len(workload) != state.p:
            raise ValueError("workload must have one sequence per process")
        self.state = state
        self.workload = [tuple(w) for w in workload]
        self.runs: list[Optional[ProcessRun]] = [None] * state.p
        self.cursors = [0] * state.p
        self.opids = [0] * state.p
        self.next_opid = 0
        self.events: list[dict] = []
        self.schedule: list[int] = []

    def pending(self, pid: int) -> bool:
        i = pid - 1
        return self.runs[i] is not None or self.cursors[i] < len(self.workload[i])

    def all_done(self) -> bool:
        return not any(self.pending(pid) for pid in range(1, self.state.p + 1))

    def op_done(self, pid: int) -> bool:
        """True when the op most recently invoked on pid has responded."""
        return self.runs[pid - 1] is None

    def step(self, pid: int) -> str:
        self.schedule.append(pid)
        i = pid - 1
        run = self.runs[i]
        if run is None:
            if self.cursors[i] >= len(self.workload[i]):
                return "noop"
            item = self.workload[i][self.cursors[i]]
            opid = self.next_opid
            self.next_opid += 1
            self.opids[i] = opid
            self.events.append(
                {"type": "invoke", "pid": pid, "op": opid, "item": item}
            )
            run = ProcessRun(pid, item)
            self.runs[i] = run
            dmtf.step(self.state, run, None)  # the private allocation step
            return "stepped"
        finished = dmtf.step(self.state, run, self.events.append)
        if finished:
            self.events.append(
                {
                    "type": "respond",
                    "pid": pid,
                    "op": self.opids[i],
                    "result": run.result,
                    "inspected": run.inspected,
                }
            )
            self.runs[i] = None
            self.cursors[i] += 1
            return "responded"
        return "stepped"

    def history(self) -> ExecutionHistory:
        return ExecutionHistory(
            p=self.state.p,
            phi=self.state.phi,
            items=self.state.items,
            workload=tuple(self.workload),
            events=self.events,
            schedule=self.schedule,
            completed=self.all_done(),
        )


def run(
    state: SharedState,
    workload: Workload,
    schedule: Schedule,
    step_bound: int = 1_000_000,
) -> ExecutionHistory:
    """Drive the interpreter to completion (or the step bound)."""
    drv = _Driver(state, workload)
    steps = 0

    def budget() -> bool:
        nonlocal steps
        steps += 1
        return steps <= step_bound

    if schedule.kind == "explicit":
        for pid in schedule.pids or []:
            if drv.all_done() or not budget():
                break
            drv.step(pid)
    elif schedule.kind == "round_robin":
        pid = 0
        while not drv.all_done() and budget():
            pid = pid % state.p + 1
            drv.step(pid)
    elif schedule.kind == "random":
        rng = random.Random(schedule.seed)
        while not drv.all_done() and budget():
            choices = [q for q in range(1, state.p + 1) if drv.pending(q)]
            drv.step(rng.choice(choices))
    elif schedule.kind == "sequential":
        merge = schedule.merge or Merge.concatenation(drv.workload)
        ok = True
        for pid, _idx in merge.steps:
            if not ok:
                break
            drv.step(pid)  # invoke
            while not drv.op_done(pid):
                if not budget():
                    ok = False
                    break
                drv.step(pid)
    else:
        raise ValueError(f"unknown schedule kind {schedule.kind!r}")
    return drv.history()


# -- linearization -------------------------------------------------------------


@dataclass(frozen=True)
class WitnessEntry:
    opid: int
    pid: int
    item: int
    result: int
    point: int  # event index of the linearization point


@dataclass(frozen=True)
class LinearizationWitness:
    order: tuple[WitnessEntry, ...]

    def linearized_items(self) -> tuple[int, ...]:
        return tuple(w.item for w in self.order)


@dataclass(frozen=True)
class Counterexample:
    reason: str
    opid: Optional[int]
    prefix: tuple[dict, ...]


@dataclass
class _Op:
    opid: int
    pid: int
    item: int
    invoke_t: int
    respond_t: Optional[int] = None
    result: Optional[int] = None
    inspected: int = 0


def _collect_ops(history: ExecutionHistory) -> list[_Op]:
    ops: dict[int, _Op] = {}
    for t, ev in enumerate(history.events):
        if ev["type"] == "invoke":
            ops[ev["op"]] = _Op(ev["op"], ev["pid"], ev["item"], t)
        elif ev["type"] == "respond":
            op = ops[ev["op"]]
            op.respond_t = t
            op.result = ev["result"]
            op.inspected = ev["inspected"]
    return list(ops.values())


def _front_episodes(history: ExecutionHistory) -> list[tuple[int, int, Optional[int]]]:
    """(start event index, front handle, prepending opid) per reign.

    The initial front (handle 0 by construction) starts at -1 with no
    prepender.  Fronts never repeat because no node is prepended twice.
    """
    episodes: list[tuple[int, int, Optional[int]]] = [(-1, 0, None)]
    active: dict[int, int] = {}  # pid -> opid currently running
    for t, ev in enumerate(history.events):
        if ev["type"] == "invoke":
            active[ev["pid"]] = ev["op"]
        elif ev["type"] == "respond":
            active.pop(ev["pid"], None)
        elif (
            ev["type"] == "access"
            and ev["kind"] == "cas"
            and ev["cell"] == ["head"]
            and ev["ok"]
        ):
            episodes.append((t, ev["new"][0], active.get(ev["pid"])))
    return episodes


def check_linearizable(history: ExecutionHistory):
    """Build a linearization witness, or return a Counterexample."""
    ops = _collect_ops(history)
    episodes = _front_episodes(history)
    starts = [e[0] for e in episodes]
    ends = starts[1:] + [len(history.events) + 1]
    by_front = {front: k for k, (_, front, _) in enumerate(episodes)}
    preppers = {k: opid for k, (_, _, opid) in enumerate(episodes) if opid is not None}

    placed: list[tuple[int, int, int, WitnessEntry]] = []
    for op in ops:
        if op.respond_t is None:
            continue  # pending at the step bound: optional, excluded
        if op.result == NOT_PRESENT:
            if op.item in history.items:
                return Counterexample(
                    f"op {op.opid} reported absent item {op.item} which is in the set",
                    op.opid,
                    tuple(history.events[: op.respond_t + 1]),
                )
            entry = WitnessEntry(op.opid, op.pid, op.item, op.result, op.respond_t)
            placed.append((op.respond_t, 1, op.respond_t, entry))
            continue
        k = by_front.get(op.result)
        point = None
        if k is not None:
            point = max(op.invoke_t, starts[k])
            if not (point <= op.respond_t and point < ends[k]):
                point = None
        if point is None:
            point = _exhaustive_point(op, episodes, starts, ends)
        if point is None:
            return Counterexample(
                f"op {op.opid} returned node {op.result}, never at the front "
                "during its interval",
                op.opid,
                tuple(history.events[: op.respond_t + 1]),
            )
        mover = 0 if (k is not None and preppers.get(k) == op.opid) else 1
        entry = WitnessEntry(op.opid, op.pid, op.item, op.result, point)
        placed.append((point, mover, op.respond_t, entry))

    placed.sort(key=lambda x: (x[0], x[1], x[2]))
    return LinearizationWitness(tuple(e for *_rest, e in placed))


def _exhaustive_point(op, episodes, starts, ends) -> Optional[int]:
    """Fallback: scan every front reign overlapping the op's interval."""
    for k, (_, front, _) in enumerate(episodes):
        if front == op.result:
            point = max(op.invoke_t, starts[k])
            if point <= op.respond_t and point < ends[k]:
                return point
    return None


def verify_witness(history: ExecutionHistory, witness: LinearizationWitness) -> None:
    """Replay the witness against sequential move-to-front semantics.

    Checks that every returned node contains the requested item, and that
    serving the witness order under MTF keeps the item set intact.  Raises
    AssertionError on mismatch.
    """
    order = list(history.items)
    handle_items = {}
    for ev in history.events:
        if ev["type"] == "access" and ev["cell"][0] == "node" and ev["cell"][2] == "item":
            handle_items[ev["cell"][1]] = ev["value"]
    for entry in witness.order:
        if entry.result == NOT_PRESENT:
            assert entry.item not in order
            continue
        assert entry.item in order
        known = handle_items.get(entry.result)
        assert known is None or known == entry.item
        order.remove(entry.item)
        order.insert(0, entry.item)


# -- cost accounting -------------------------------------------------------------


@dataclass(frozen=True)
class CostReport:
    op_level: int
    item_level: int
    actual: int
    n_completed: int
    linearized: tuple[int, ...]

    def csv_row(self) -> str:
        return f"{self.op_level},{self.item_level},{self.actual},{self.n_completed}"


def account(history: ExecutionHistory) -> CostReport:
    """The three cost levels of a linearizable history."""
    witness = check_linearizable(history)
    if isinstance(witness, Counterexample):
        raise ValueError(f"history is not linearizable: {witness.reason}")
    ops = [op for op in _collect_ops(history) if op.respond_t is not None]
    linearized = witness.linearized_items()
    present = [w.item for w in witness.order if w.result != NOT_PRESENT]
    op_level, _ = mtf_run(present, history.items, CostModel.FULL)
    item_level = sum(op.inspected for op in ops)
    actual = len(history.accesses())
    return CostReport(op_level, item_level, actual, len(ops), linearized)


# oracle cost is linear in sequence length but factorial in list length,
# so only the list-length budget is kept protective here
_ORACLES = {
    "free": lambda seq, init: opt_free_cost(seq, init, max_len=10_000_000),
    "paid": opt_paid_cost,
}


@dataclass(frozen=True)
class RatioResult:
    ratio: Fraction
    dmtf_cost: int
    opt_cost: int
    mode: str
    oracle: str
    model: CostModel
    report: CostReport


def ratio_experiment(
    items: Sequence[int],
    workload: Workload,
    schedule: Schedule,
    phi: int = 1,
    mode: str = "linearization",
    merge_for_opt: Optional[Merge] = None,
    oracle: str = "free",
    model: CostModel = CostModel.FULL,
) -> RatioResult:
    """Measured item-access cost against an optimal sequential cost.

    ``fully_adversarial`` divides by the oracle cost of an independently
    supplied merge of the workload; ``linearization`` divides by the oracle
    cost of the linearized sequence of the run itself.  Under the partial
    model both sides drop one unit per request.
    """
    state = dmtf.init(items, len(workload), phi)
    history = run(state, workload, schedule)
    if not history.completed:
        raise RuntimeError("run did not complete; raise the step bound")
    report = account(history)
    if mode == "fully_adversarial":
        if merge_for_opt is None:
            raise ValueError("fully_adversarial mode needs a merge for the oracle")
        opt_seq = merge_for_opt.flatten(workload)
    elif mode == "linearization":
        opt_seq = report.linearized
    else:
        raise ValueError(f"unknown mode {mode!r}")
    opt = _ORACLES[oracle](opt_seq, list(items))
    dmtf_cost = report.item_level
    if model is CostModel.PARTIAL:
        dmtf_cost -= report.n_completed
        opt -= len(opt_seq)
    return RatioResult(
        Fraction(dmtf_cost, opt), dmtf_cost, opt, mode, oracle, model, report
    )


# -- exhaustive exploration --------------------------------------------------------


@dataclass
class ExploreReport:
    states: int
    histories: int
    bound_hits: int
    violations: list[str] = field(default_factory=list)


def _clone_state(state: SharedState) -> SharedState:
    new = SharedState.__new__(SharedState)
    new.items = state.items
    new.p = state.p
    new.phi = state.phi
    new.arena = []
    for n in state.arena:
        c = dmtf.Node(n.item)
        c.next, c.prev, c.old, c.new = n.next, n.prev, n.old, n.new
        new.arena.append(c)
    new.head = state.head
    new.ann = list(state.ann)
    new.ever_in_list = set(state.ever_in_list)
    new.prepend_counts = dict(state.prepend_counts)
    new.removed = set(state.removed)
    new.transition_violations = list(state.transition_violations)
    new.cas_locks = state.cas_locks
    return new


def explore_all(
    state_factory: Callable[[], SharedState],
    workload: Workload,
    step_bound: int = 200,
    report: Optional[ExploreReport] = None,
) -> Iterator[ExecutionHistory]:
    """Enumerate schedules depth-first, pruning repeated canonical states.

    Yields the history of every terminating schedule that explores at least
    one new state on each prefix (pruned schedules revisit a state some other
    schedule already reached, so their reachable behavior is covered).  Paths
    cut off by the step bound count as ``bound_hits``.
    """
    if report is None:
        report = ExploreReport(0, 0, 0)
    seen: set = set()

    def canon(drv: _Driver) -> tuple:
        return (
            drv.state.canonical(),
            tuple(r.canonical() if r else None for r in drv.runs),
            tuple(drv.cursors),
        )

    def clone_driver(drv: _Driver) -> _Driver:
        new = _Driver.__new__(_Driver)
        new.state = _clone_state(drv.state)
        new.workload = drv.workload
        new.runs = [
            ProcessRun(**vars(r)) if r is not None else None for r in drv.runs
        ]
        new.cursors = list(drv.cursors)
        new.opids = list(drv.opids)
        new.next_opid = drv.next_opid
        new.events = list(drv.events)
        new.schedule = list(drv.schedule)
        return new

    def dfs(drv: _Driver, depth: int) -> Iterator[ExecutionHistory]:
        if drv.all_done():
            report.histories += 1
            yield drv.history()
            return
        if depth >= step_bound:
            report.bound_hits += 1
            return
        for pid in range(1, drv.state.p + 1):
            if not drv.pending(pid):
                continue
            child = clone_driver(drv)
            outcome = child.step(pid)
            if child.state.transition_violations:
                report.violations.append(
                    f"schedule {child.schedule}: "
                    f"{child.state.transition_violations[-1]}"
                )
            if outcome == "responded":
                # every response reached by the exploration must already
                # linearize against the path that produced it
                verdict = check_linearizable(child.history())
                if isinstance(verdict, Counterexample):
                    report.violations.append(
                        f"schedule {child.schedule}: {verdict.reason}"
                    )
            key = canon(child)
            if key in seen:
                continue
            seen.add(key)
            report.states += 1
            yield from dfs(child, depth + 1)

    base = _Driver(state_factory(), workload)
    seen.add(canon(base))
    report.states += 1
    yield from dfs(base, 0)


def explore_check(
    state_factory: Callable[[], SharedState],
    workload: Workload,
    step_bound: int = 200,
) -> ExploreReport:
    """Run the exploration and check every terminal history.

    Each terminating schedule must leave a state passing all snapshot
    invariants and produce a linearizable history.
    """
    report = ExploreReport(0, 0, 0)
    for history in explore_all(state_factory, workload, step_bound, report):
        # re-execute to recover the final state for snapshot checking
        state = state_factory()
        replay = run(state, workload, Schedule(kind="explicit", pids=history.schedule))
        if replay.to_jsonl() != history.to_jsonl():
            report.violations.append("replay mismatch")
            continue
        for v in dmtf.snapshot_invariants(state):
            report.violations.append(f"schedule {history.schedule}: {v}")
        witness = check_linearizable(history)
        if isinstance(witness, Counterexample):
            report.violations.append(
                f"schedule {history.schedule}: {witness.reason}"
            )
        else:
            try:
                verify_witness(history, witness)
            except AssertionError as exc:
                report.violations.append(
                    f"schedule {history.schedule}: witness replay failed: {exc}"
                )
    return report
