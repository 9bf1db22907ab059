from __future__ import annotations

import random

from cpdkit.model import (
    Connection,
    ConnectionKind,
    ElementKind,
    new_diagram,
    new_element,
)
from cpdkit.validate import (
    MISSING_INTRO_MESSAGE,
    NO_ISSUES_MESSAGE,
    DiagnosticCode,
    Severity,
    allowed_successor,
    check,
    report,
)

from .conftest import load_fixture
from .oracles import brute_force_findings, random_diagram

K = ElementKind


def chain(*kinds: ElementKind, labels: list[str] | None = None):
    elements = [
        new_element(kind, (labels[i] if labels else f"{kind.display} {i}"))
        for i, kind in enumerate(kinds)
    ]
    connections = [
        Connection(
            id=f"cn-{i}",
            source=a.id,
            target=b.id,
            kind=ConnectionKind.CAUSAL,
        )
        for i, (a, b) in enumerate(zip(elements, elements[1:]))
    ]
    return new_diagram("chain", elements, connections), elements, connections


class TestCheck:
    def test_fig1_fixture_is_clean(self, fig1):
        assert check(fig1) == []

    def test_empty_diagram_reports_all_five_required_kinds(self):
        diagnostics = check(new_diagram("empty"))
        assert [d.code for d in diagnostics] == [
            DiagnosticCode.MISSING_REQUIRED_ELEMENT
        ] * 5
        assert [d.kind for d in diagnostics] == [
            K.STRATEGY,
            K.MECHANISM,
            K.BARRIER,
            K.PROXIMAL_OUTCOME,
            K.DISTAL_OUTCOME,
        ]

    def test_disconnected_element_is_named(self):
        diagram = load_fixture("disconnected")
        diagnostics = check(diagram)
        assert [(d.code, d.subjects) for d in diagnostics] == [
            (DiagnosticCode.DISCONNECTED_ELEMENT, ("el-floating",))
        ]

    def test_wrong_order_names_the_connection(self):
        diagram = load_fixture("wrong_order")
        diagnostics = check(diagram)
        assert [(d.code, d.subjects) for d in diagnostics] == [
            (DiagnosticCode.INVALID_ORDER, ("cn-bad-order",))
        ]
        # The message names both endpoint labels on a single line.
        message = diagnostics[0].message
        assert "\n" not in message
        assert "Display poster with positive messaging" in message
        assert "Clients take the stairs instead of the elevators" in message

    def test_wrong_endpoints_names_the_path_head(self):
        diagram = load_fixture("wrong_endpoints")
        diagnostics = check(diagram)
        assert [(d.code, d.subjects) for d in diagnostics] == [
            (DiagnosticCode.INVALID_ENDPOINTS, ("el-mech2",))
        ]

    def test_truncated_chain_reports_missing_and_endpoints(self):
        diagram, elements, _ = chain(K.STRATEGY, K.MECHANISM, K.PROXIMAL_OUTCOME)
        codes = [(d.code, d.kind or d.subjects) for d in check(diagram)]
        assert codes == [
            (DiagnosticCode.MISSING_REQUIRED_ELEMENT, K.BARRIER),
            (DiagnosticCode.MISSING_REQUIRED_ELEMENT, K.DISTAL_OUTCOME),
            (DiagnosticCode.INVALID_ENDPOINTS, (elements[-1].id,)),
        ]

    def test_mechanism_used_as_annotator_is_wrong_order(self):
        strategy = new_element(K.STRATEGY, "s")
        mechanism = new_element(K.MECHANISM, "m")
        rogue = new_element(K.MECHANISM, "annotating mechanism")
        edge = Connection(
            id="cn-1", source=strategy.id, target=mechanism.id, kind=ConnectionKind.CAUSAL
        )
        misuse = Connection(
            id="cn-2", source=rogue.id, target=strategy.id, kind=ConnectionKind.ANNOTATES
        )
        diagram = new_diagram("d", [strategy, mechanism, rogue], [edge, misuse])
        codes = {(d.code, d.subjects) for d in check(diagram)}
        assert (DiagnosticCode.INVALID_ORDER, ("cn-2",)) in codes

    def test_barrier_may_lead_to_mechanism(self):
        assert allowed_successor(K.BARRIER, K.MECHANISM)
        diagram, _, _ = chain(
            K.STRATEGY, K.MECHANISM, K.BARRIER, K.MECHANISM, K.PROXIMAL_OUTCOME,
            K.DISTAL_OUTCOME,
        )
        assert not any(d.code is DiagnosticCode.INVALID_ORDER for d in check(diagram))

    def test_reversed_mid_connection_surfaces_as_endpoint_errors(self):
        # barrier→mechanism is a legal pair, so reversing the middle of the
        # stem breaks the pathway endpoints rather than the ordering rule.
        diagram, elements, connections = chain(
            K.STRATEGY, K.MECHANISM, K.BARRIER, K.PROXIMAL_OUTCOME, K.DISTAL_OUTCOME
        )
        reversed_middle = [
            Connection(id=c.id, source=c.target, target=c.source, kind=c.kind)
            if c.id == "cn-1"
            else c
            for c in connections
        ]
        broken = new_diagram("broken", elements, reversed_middle)
        codes = {d.code for d in check(broken)}
        assert DiagnosticCode.INVALID_ORDER not in codes
        assert DiagnosticCode.INVALID_ENDPOINTS in codes

    def test_intermediate_outcome_cycle_is_endpoint_error(self):
        first = new_element(K.INTERMEDIATE_OUTCOME, "a")
        second = new_element(K.INTERMEDIATE_OUTCOME, "b")
        loop = [
            Connection(id="cn-1", source=first.id, target=second.id, kind=ConnectionKind.CAUSAL),
            Connection(id="cn-2", source=second.id, target=first.id, kind=ConnectionKind.CAUSAL),
        ]
        diagram = new_diagram("cycle", [first, second], loop)
        codes = {d.code for d in check(diagram)}
        assert DiagnosticCode.INVALID_ENDPOINTS in codes
        assert DiagnosticCode.INVALID_ORDER not in codes

    def test_empty_label_is_warning_only(self):
        diagram, elements, connections = chain(
            K.STRATEGY, K.MECHANISM, K.BARRIER, K.PROXIMAL_OUTCOME, K.DISTAL_OUTCOME
        )
        import dataclasses

        blank = [dataclasses.replace(elements[1], label="  ")] + [
            e for e in elements if e is not elements[1]
        ]
        diagram = new_diagram("blank", blank, connections)
        diagnostics = check(diagram)
        assert [d.code for d in diagnostics] == [DiagnosticCode.EMPTY_LABEL]
        assert diagnostics[0].severity is Severity.WARNING
        assert report(diagnostics).startswith(NO_ISSUES_MESSAGE)

    def test_check_is_pure_and_ordered(self):
        diagram = load_fixture("wrong_order")
        assert check(diagram) == check(diagram)
        rng = random.Random(7)
        for _ in range(50):
            sample = random_diagram(rng)
            first = check(sample)
            assert first == check(sample)
            keys = [(d.code, d.subjects) for d in first]
            order = {code: i for i, code in enumerate(DiagnosticCode)}
            assert keys == sorted(keys, key=lambda k: (order[k[0]], k[1]))

    def test_agrees_with_brute_force_on_random_diagrams(self):
        rng = random.Random(99)
        for _ in range(300):
            diagram = random_diagram(rng)
            got = {(d.code.value, d.subjects) for d in check(diagram)}
            assert got == brute_force_findings(diagram), diagram


class TestRepairMonotonicity:
    def test_completing_a_partial_stem_never_adds_errors(self):
        # Start from every contiguous window of the stem and repair missing
        # kinds one at a time, always wiring the new element legally (grow
        # the window at either end). A correct repair never increases the
        # number of error findings and never breaks the ordering rule.
        full = (K.STRATEGY, K.MECHANISM, K.BARRIER, K.PROXIMAL_OUTCOME, K.DISTAL_OUTCOME)
        for start in range(len(full)):
            for stop in range(start + 1, len(full) + 1):
                for prefer_prepend in (True, False):
                    low, high = start, stop
                    before_count = self._error_count(full[low:high])
                    while (low, high) != (0, len(full)):
                        grow_front = low > 0 and (prefer_prepend or high == len(full))
                        if grow_front:
                            low -= 1
                        else:
                            high += 1
                        diagnostics = check(new_diagram("stem", *self._stem(full[low:high])))
                        assert not any(
                            d.code is DiagnosticCode.INVALID_ORDER for d in diagnostics
                        )
                        after_count = sum(
                            1 for d in diagnostics if d.severity is Severity.ERROR
                        )
                        assert after_count <= before_count
                        before_count = after_count
                    assert before_count == 0

    @staticmethod
    def _stem(kinds):
        elements = [new_element(kind, kind.display) for kind in kinds]
        connections = [
            Connection(id=f"cn-{i}", source=a.id, target=b.id, kind=ConnectionKind.CAUSAL)
            for i, (a, b) in enumerate(zip(elements, elements[1:]))
        ]
        return elements, connections

    @classmethod
    def _error_count(cls, kinds):
        diagnostics = check(new_diagram("stem", *cls._stem(kinds)))
        return sum(1 for d in diagnostics if d.severity is Severity.ERROR)


class TestReport:
    def test_clean_report_is_exact(self):
        assert report([]) == NO_ISSUES_MESSAGE

    def test_missing_block_wording(self):
        diagram = new_diagram(
            "only-distal", [new_element(K.STRATEGY, "s")]
        )
        text = report(check(diagram))
        assert MISSING_INTRO_MESSAGE in text
        assert "- distal outcome" in text
        assert "- proximal outcome" in text
        assert NO_ISSUES_MESSAGE not in text

    def test_fig1_report_is_the_confirmation(self, fig1):
        assert report(check(fig1)) == NO_ISSUES_MESSAGE

    def test_other_diagnostics_render_one_line_each(self):
        diagram = load_fixture("wrong_order")
        text = report(check(diagram))
        assert len(text.splitlines()) == 1
