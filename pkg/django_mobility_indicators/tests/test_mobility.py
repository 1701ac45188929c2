"""Tests for year labelling, return detection and mobility profiles."""

from itertools import product

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ..constants import AggregationLevel, MobilityLabel
from ..exceptions import ContractViolationError
from ..services import corpus_service, mobility_service
from .factories import affiliation, history, histories, record

NL = "NETHERLANDS"
US = "USA"
ES = "SPAIN"

country_sets = st.frozensets(st.sampled_from(["A", "B", "C", "D"]), min_size=1, max_size=3)


def labels(events):
    return [event.label for event in events]


class LabelYearTest(SimpleTestCase):
    """Tests for the single-year decision rule."""

    def test_examples(self):
        cases = [
            ({NL}, {NL}, MobilityLabel.NON_MOBILE),
            ({US}, {NL}, MobilityLabel.MOBILE),
            ({NL, US}, {NL}, MobilityLabel.MOBILE_AND_MULTI),
            ({NL, US}, {NL, US}, MobilityLabel.MULTI_AFFILIATION),
            ({NL}, {NL, US}, MobilityLabel.NON_MOBILE),
            ({NL}, None, MobilityLabel.NON_MOBILE),
            ({NL, US}, None, MobilityLabel.MULTI_AFFILIATION),
        ]
        for current, prior, expected in cases:
            with self.subTest(current=current, prior=prior):
                result = mobility_service.label_year(
                    frozenset(current), frozenset(prior) if prior is not None else None
                )
                self.assertEqual(result, expected)

    def test_empty_current_is_contract_violation(self):
        with self.assertRaises(ContractViolationError):
            mobility_service.label_year(frozenset(), frozenset({NL}))

    def test_all_two_country_pairs(self):
        """Test every pair of non-empty subsets of two countries against hand enumeration."""
        nl, us, both = frozenset({NL}), frozenset({US}), frozenset({NL, US})
        table = [
            (nl, nl, MobilityLabel.NON_MOBILE),
            (nl, us, MobilityLabel.MOBILE),
            (nl, both, MobilityLabel.MOBILE_AND_MULTI),
            (us, nl, MobilityLabel.MOBILE),
            (us, us, MobilityLabel.NON_MOBILE),
            (us, both, MobilityLabel.MOBILE_AND_MULTI),
            (both, nl, MobilityLabel.NON_MOBILE),
            (both, us, MobilityLabel.NON_MOBILE),
            (both, both, MobilityLabel.MULTI_AFFILIATION),
        ]
        for prior, current, expected in table:
            with self.subTest(prior=sorted(prior), current=sorted(current)):
                self.assertEqual(mobility_service.label_year(current, prior), expected)

    @given(current=country_sets, prior=st.one_of(st.none(), country_sets))
    @settings(max_examples=200, deadline=None)
    def test_label_partition(self, current, prior):
        """Test the label is mobile iff a new entity exists and multi iff several entities."""
        label = mobility_service.label_year(current, prior)

        is_mobile = prior is not None and bool(current - prior)
        self.assertEqual(label in (MobilityLabel.MOBILE, MobilityLabel.MOBILE_AND_MULTI), is_mobile)
        self.assertEqual(
            label in (MobilityLabel.MULTI_AFFILIATION, MobilityLabel.MOBILE_AND_MULTI), len(current) > 1
        )


class ClassifyAuthorTest(SimpleTestCase):
    """Tests for per-author classification."""

    def test_gap_years_use_last_active_year(self):
        events = mobility_service.classify_author(history("A1", {2003: [ES], 2005: [US], 2007: [ES]}))

        self.assertEqual(labels(events), [MobilityLabel.NON_MOBILE, MobilityLabel.MOBILE, MobilityLabel.MOBILE])
        self.assertEqual(events[1].prior_entities, frozenset({ES}))
        self.assertEqual([event.is_return for event in events], [False, False, True])

    def test_stayer(self):
        events = mobility_service.classify_author(history("A1", {2004: [NL], 2006: [NL]}))

        self.assertEqual(labels(events), [MobilityLabel.NON_MOBILE, MobilityLabel.NON_MOBILE])
        self.assertIsNone(events[0].prior_entities)
        self.assertEqual(events[0].new_entities, frozenset())

    def test_single_multi_year(self):
        events = mobility_service.classify_author(history("A1", {2004: [NL, US]}))
        self.assertEqual(labels(events), [MobilityLabel.MULTI_AFFILIATION])

    def test_corpus_log_carries_aggregation_level(self):
        with self.assertLogs("django_mobility_indicators", level="DEBUG") as logs:
            mobility_service.classify_corpus(histories({"B1": {2004: [NL]}}), AggregationLevel.CITY)

        record = next(item for item in logs.records if item.getMessage().startswith("Classified corpus"))
        self.assertEqual(record._custom_fields["level"], "city")
        self.assertEqual(record.levelno, mobility_service.log_level)

    def test_new_entities_subset_of_current(self):
        events = mobility_service.classify_author(history("A1", {2004: [NL], 2005: [NL, US, ES]}))

        self.assertEqual(events[1].new_entities, frozenset({US, ES}))
        self.assertTrue(events[1].new_entities <= events[1].current_entities)

    def test_organization_changes_within_country_are_not_mobility(self):
        records = [
            record("P1", 2004, {"A1": [affiliation(ES, organization="UNIVERSITY A")]}),
            record("P2", 2005, {"A1": [affiliation(ES, organization="UNIVERSITY B")]}),
        ]
        author = corpus_service.build_author_histories(records)["A1"]

        country = mobility_service.classify_author(author, AggregationLevel.COUNTRY)
        organization = mobility_service.classify_author(author, AggregationLevel.ORGANIZATION)

        self.assertEqual(country[1].label, MobilityLabel.NON_MOBILE)
        self.assertEqual(organization[1].label, MobilityLabel.MOBILE)

    def test_per_paper_multi(self):
        """Test two single-country papers in one year are multi only in year mode."""
        records = [
            record("P1", 2004, {"A1": [NL]}),
            record("P2", 2005, {"A1": [NL]}),
            record("P3", 2005, {"A1": [US]}),
        ]
        author = corpus_service.build_author_histories(records)["A1"]

        by_year = mobility_service.classify_author(author, per_paper_multi=False)
        by_paper = mobility_service.classify_author(author, per_paper_multi=True)

        self.assertEqual(by_year[1].label, MobilityLabel.MOBILE_AND_MULTI)
        self.assertEqual(by_paper[1].label, MobilityLabel.MOBILE)

    def test_unknown_level_rejected(self):
        with self.assertRaises(ContractViolationError):
            mobility_service.classify_author(history("A1", {2004: [NL]}), "planet")


class DetectReturnTest(SimpleTestCase):
    """Tests for return-to-origin detection."""

    def returns(self, timeline):
        return [event.is_return for event in mobility_service.classify_author(history("A1", timeline))]

    def test_away_and_back(self):
        self.assertEqual(self.returns({2003: [ES], 2004: [US], 2005: [ES]}), [False, False, True])

    def test_never_left(self):
        self.assertEqual(self.returns({2003: [NL], 2004: [NL], 2005: [NL]}), [False, False, False])

    def test_multi_year_does_not_leave_origin(self):
        self.assertEqual(
            self.returns({2003: [ES], 2004: [ES, US], 2005: [US], 2006: [ES]}), [False, False, False, True]
        )

    def test_multi_country_origin(self):
        self.assertEqual(self.returns({2003: [ES, NL], 2004: [US], 2005: [NL]}), [False, False, True])

    def test_only_first_year_back_is_a_return(self):
        self.assertEqual(self.returns({2003: [ES], 2004: [US], 2005: [ES], 2006: [ES]}), [False, False, True, False])

    def test_brute_force_three_step_trajectories(self):
        """Test every three-year two-country trajectory against a direct reading of the rule."""
        options = [[ES], [US], [ES, US]]
        for first, second, third in product(options, options, options):
            with self.subTest(path=(first, second, third)):
                flags = self.returns({2003: first, 2004: second, 2005: third})
                origin = set(first)
                away = [not (set(step) & origin) for step in (first, second, third)]
                expected = [False, False, (not away[2]) and away[1]]
                self.assertEqual(flags, expected)


class ProfileSummaryTest(SimpleTestCase):
    """Tests for profiles and aggregate counts."""

    def setUp(self):
        self.histories = histories(
            {
                "A1": {2004: [NL], 2005: [US], 2006: [NL]},
                "A2": {2004: [ES], 2005: [ES]},
                "A3": {2004: [ES], 2005: [ES, NL]},
            }
        )
        self.events = mobility_service.classify_corpus(self.histories)
        self.profiles, self.counts = mobility_service.summarize_profiles(self.events)

    def test_profiles(self):
        self.assertTrue(self.profiles["A1"].ever_mobile)
        self.assertTrue(self.profiles["A1"].returned)
        self.assertFalse(self.profiles["A2"].ever_mobile)
        self.assertTrue(self.profiles["A3"].ever_multi)
        self.assertEqual(self.profiles["A1"].origin_entities, frozenset({NL}))

    def test_events_ordered_by_author_then_year(self):
        keys = [(event.author_id, event.year) for event in self.events]
        self.assertEqual(keys, sorted(keys))

    def test_counts_sum_to_author_years(self):
        total = self.counts[-1]

        self.assertEqual(total["year"], "total")
        self.assertEqual(total["total"], len(self.events))
        self.assertEqual(sum(total[label.value] for label in MobilityLabel), len(self.events))
        self.assertEqual(total[MobilityLabel.MOBILE.value], 2)
        self.assertEqual(total[MobilityLabel.MOBILE_AND_MULTI.value], 1)

    def test_author_shares(self):
        shares = mobility_service.author_shares(self.profiles)

        self.assertEqual(shares["authors"], 3)
        self.assertAlmostEqual(shares["mobile_author_share"], 2 / 3)
        self.assertAlmostEqual(shares["returning_author_share"], 1 / 3)

    def test_one_mobile_author_of_three(self):
        data = histories({"B1": {2004: [NL], 2005: [US]}, "B2": {2004: [NL]}, "B3": {2004: [ES]}})
        profiles, _ = mobility_service.summarize_profiles(mobility_service.classify_corpus(data))

        self.assertAlmostEqual(mobility_service.author_shares(profiles)["mobile_author_share"], 1 / 3)

    def test_order_independent(self):
        reversed_histories = dict(reversed(list(self.histories.items())))
        self.assertEqual(mobility_service.classify_corpus(reversed_histories), self.events)
