import pytest

from biaslens import corpus, pipeline


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Small synthetic corpus shared by the mechanics tests."""
    root = tmp_path_factory.mktemp("data")
    spec = corpus.SyntheticSpec(seed=20, size=400, general_size=800, domain_size=1200)
    synthetic = corpus.gen_synthetic(spec)
    corpus.save_labeled(synthetic.labeled, root / "labeled.jsonl")
    corpus.save_sentences(synthetic.general, root / "general.txt")
    corpus.save_sentences(synthetic.domain, root / "domain.txt")
    return root


@pytest.fixture(scope="session")
def mini_plan(data_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("mini-run")
    return pipeline.StagePlan(
        stages=[
            pipeline.StageSpec(str(data_dir / "general.txt"), epochs=6, learning_rate=3e-3,
                               batch_size=32, role="general"),
            pipeline.StageSpec(str(data_dir / "domain.txt"), epochs=10, learning_rate=3e-3,
                               batch_size=32, role="domain"),
        ],
        labeled_path=str(data_dir / "labeled.jsonl"),
        out_dir=str(out),
        seed=3,
        model={"embed_dim": 32, "hidden_dim": 64, "dropout_keep": 0.8, "bptt_window": 32},
        classifier=pipeline.FinetuneSettings(max_epochs=60, learning_rate=1e-2,
                                             batch_size=16, patience=15),
    )


@pytest.fixture(scope="session")
def mini_model(mini_plan):
    """One trained pipeline shared by screener, gateway and CLI tests."""
    result = pipeline.run_progressive(mini_plan)
    return result
