import pytest

from netsap.io import fixture_path, load_fixture, pairs_from_json


@pytest.fixture(scope="session")
def toy():
    return load_fixture("toy")


@pytest.fixture(scope="session")
def prodline():
    return load_fixture("prodline")


@pytest.fixture(scope="session")
def toy_spec(toy):
    return pairs_from_json(toy, fixture_path("toy_spec.json"))


def policy(model, *entries):
    """Policy from ``(state name, event name)`` pairs."""
    return frozenset((model.state_id[q], model.event_id[e]) for q, e in entries)


def names(model, pol):
    return sorted((model.state_names[q], model.event_names[e]) for q, e in pol)
