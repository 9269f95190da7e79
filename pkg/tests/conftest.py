import pytest

from doccat.textprep import default_config, preprocess_corpus

from helpers import make_synthetic_corpus


@pytest.fixture(scope="session")
def default_cfg():
    return default_config()


@pytest.fixture(scope="session")
def synth_train():
    """12 categories x 20 documents over disjoint keyword pools."""
    return make_synthetic_corpus(20, seed=100)


@pytest.fixture(scope="session")
def synth_test():
    """Held-out 12 x 5 set drawn from the same pools."""
    return make_synthetic_corpus(5, seed=200)


@pytest.fixture(scope="session")
def synth_train_tokens(default_cfg, synth_train):
    return preprocess_corpus(synth_train, default_cfg)


@pytest.fixture(scope="session")
def tiny_corpus():
    """3 categories x 4 documents; fast enough for CLI round trips."""
    return make_synthetic_corpus(4, seed=50, n_categories=3, pool_size=3)
