import numpy as np
import pytest

from cutsim.contact import (
    ConfusionStats,
    DegenerateModelError,
    InfeasibleSplitError,
    IntegrityError,
    ParseError,
    Replicate,
    SampleSet,
    SplitScheme,
    SynthSpec,
    build_split,
    evaluate,
    ingest_replicates,
    label_approaching,
    load_model,
    make_corpus,
    oob_error,
    parse_replicate_csv,
    predict,
    preprocess,
    replicate_to_csv,
    save_model,
    synth_sensor_stream,
    train_forest,
    tune_mtry,
)
from cutsim.contact.data import CSV_HEADER


def tiny_replicate(contact, rid="r0", cut="slicing", seed=0):
    rng = np.random.default_rng(seed)
    n = len(contact)
    return Replicate(
        rid, cut, np.arange(n) * 10.0, rng.normal(size=(n, 10)), np.asarray(contact)
    )


def toy_sampleset(n=400, seed=0, informative=1):
    """Linearly separable by the first `informative` features."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 10))
    y = (X[:, :informative].sum(axis=1) > 0).astype(np.uint8)
    ids = np.full(n, "toy", object)
    cuts = np.full(n, "slicing", object)
    return SampleSet(X, y, ids, cuts)


# --- ingest ------------------------------------------------------------------

def test_minimal_csv_roundtrip(tmp_path):
    rep = tiny_replicate([0, 1, 1])
    p = tmp_path / "r0.csv"
    p.write_text(replicate_to_csv(rep))
    [back] = ingest_replicates([p])
    assert back.id == rep.id and back.cut_type == rep.cut_type
    assert len(back) == 3
    assert np.allclose(back.features, rep.features)
    assert np.array_equal(back.contact, rep.contact)


def test_paper_scale_replicate(tmp_path):
    # one replicate at the reported scale: 1,462 samples, ~69.5% in contact
    spec = SynthSpec(
        id="loin-1",
        cut_type="slicing",
        n_samples=1462,
        contact_intervals=tuple(
            (i * 1620.0 + 500.0, i * 1620.0 + 1630.0) for i in range(9)
        ),
    )
    rep = synth_sensor_stream(spec, seed=1)
    p = tmp_path / "loin.csv"
    p.write_text(replicate_to_csv(rep))
    [back] = ingest_replicates([p])
    assert len(back) == 1462
    assert 0.6 < back.contact.mean() < 0.8


def test_shuffled_timestamps_rejected():
    with pytest.raises(IntegrityError):
        Replicate("x", "slicing", [0.0, 20.0, 10.0], np.zeros((3, 10)), [0, 0, 0])


def test_irregular_period_rejected(tmp_path):
    rep = tiny_replicate([0, 0, 0])
    text = replicate_to_csv(rep).replace("20.0", "80.0")
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(IntegrityError):
        ingest_replicates([p])


def test_malformed_row_reports_line():
    text = f"# id=a\n# cut_type=slicing\n{CSV_HEADER}\n1,2,3\n"
    with pytest.raises(ParseError, match="line 4"):
        parse_replicate_csv(text)


def test_missing_metadata_rejected():
    text = f"{CSV_HEADER}\n" + ",".join(["0"] * 12) + "\n"
    with pytest.raises(ParseError, match="preamble"):
        parse_replicate_csv(text)


# --- preprocess --------------------------------------------------------------

def test_constant_feature_centered_with_warning():
    rep = tiny_replicate([0, 1, 0, 1], seed=2)
    rep.features[:, 3] = 7.5
    with pytest.warns(UserWarning, match="zero-variance"):
        [out], removed = preprocess([rep])
    assert np.allclose(out.features[:, 3], 0.0)
    assert removed["r0"] == 0


def test_spike_removed():
    rng = np.random.default_rng(0)
    feats = rng.normal(size=(200, 10))
    feats[50, 2] = 60.0  # way past 5 standard deviations
    rep = Replicate("s", "cubing", np.arange(200) * 10.0, feats, np.zeros(200, np.uint8))
    [out], removed = preprocess([rep])
    assert removed["s"] == 1
    assert len(out) == 199
    assert out.t_ms[50] == 510.0  # sample 50 is gone


def test_standardization_statistics():
    rng = np.random.default_rng(1)
    feats = rng.normal(loc=3.0, scale=2.5, size=(500, 10))
    rep = Replicate("z", "trimming", np.arange(500) * 10.0, feats, np.zeros(500, np.uint8))
    mu = feats.mean(axis=0)
    sd = feats.std(axis=0)
    z = (feats - mu) / sd
    assert np.abs(z.mean(axis=0)).max() < 1e-9
    assert np.allclose(z.std(axis=0), 1.0)
    [out], _ = preprocess([rep])
    keep = (np.abs(z) <= 5).all(axis=1)
    assert np.allclose(out.features, z[keep])


# --- approaching labels ------------------------------------------------------

def test_approaching_window_membership():
    contact = np.zeros(110, np.uint8)
    contact[100:] = 1  # onset at t = 1000 ms
    rep = tiny_replicate(contact, seed=3)
    out = label_approaching(rep)
    t_to_label = dict(zip(out.t_ms, out.contact))
    assert t_to_label[950.0] == 1  # 50 ms before the onset
    assert t_to_label[995.0 - 5.0] == 1  # 10 ms gap, inclusive
    assert t_to_label[900.0] == 1  # 100 ms gap, inclusive
    assert t_to_label[890.0] == 0  # 110 ms, past the window
    assert 1000.0 not in t_to_label  # in-contact samples dropped


def test_approaching_labels_consistent_with_onsets():
    spec = SynthSpec(
        id="a", cut_type="cubing", n_samples=600,
        contact_intervals=((800.0, 1500.0), (3000.0, 3600.0), (5000.0, 5500.0)),
    )
    rep = synth_sensor_stream(spec, seed=5)
    out = label_approaching(rep)
    onsets = {800.0, 3000.0, 5000.0}
    for t, label in zip(out.t_ms, out.contact):
        expected = any(10.0 <= on - t <= 100.0 for on in onsets)
        assert bool(label) == expected


# --- splits ------------------------------------------------------------------

def corpus_small(seed=0):
    return make_corpus(replicates_per_type=4, n_samples=300, drift=0.5, seed=seed)


def test_rwt_replicate_counts():
    reps = [tiny_replicate([0, 1], rid=f"r{i}", seed=i) for i in range(10)]
    train, test = build_split(reps, SplitScheme("rwt", seed=1))
    assert len(set(train.replicate_ids)) == 6
    assert len(set(test.replicate_ids)) == 4


def test_swt_sample_counts():
    reps = [tiny_replicate(np.tile([0, 1], 50), rid=f"r{i}", seed=i) for i in range(10)]
    train, test = build_split(reps, SplitScheme("swt", seed=1))
    assert len(train) == 600 and len(test) == 400


def test_split_partition_identity():
    corpus = corpus_small()
    for kind in ("swt", "rwt", "sat"):
        train, test = build_split(corpus, SplitScheme(kind, seed=3))
        total = sum(len(r) for r in corpus)
        assert len(train) + len(test) == total
        # disjoint + exhaustive: multiset of (id, t-index-in-replicate) rows
        def keys(s):
            return sorted(map(tuple, np.column_stack([s.replicate_ids, s.X[:, 0]]).tolist()))
        merged = keys(train) + keys(test)
        pooled_keys = []
        for r in corpus:
            pooled_keys += [(r.id, x) for x in r.features[:, 0].tolist()]
        assert sorted(merged) == sorted(map(tuple, pooled_keys))


def test_rwt_test_replicates_unseen():
    corpus = corpus_small()
    train, test = build_split(corpus, SplitScheme("rwt", seed=2))
    assert not set(train.replicate_ids) & set(test.replicate_ids)


def test_rwt_single_replicate_infeasible():
    reps = [tiny_replicate([0, 1], rid="only", seed=0)]
    with pytest.raises(InfeasibleSplitError):
        build_split(reps, SplitScheme("rwt"))


def test_split_deterministic_under_seed():
    corpus = corpus_small()
    a1, b1 = build_split(corpus, SplitScheme("sat", seed=9))
    a2, b2 = build_split(corpus, SplitScheme("sat", seed=9))
    assert np.array_equal(a1.X, a2.X) and np.array_equal(b1.y, b2.y)


# --- forest ------------------------------------------------------------------

def test_separable_data_training_error_zero():
    data = toy_sampleset()
    model = train_forest(data, n_trees=30, mtry=3, seed=0)
    assert (predict(model, data.X) == data.y).all()


def test_oob_close_to_holdout():
    train = toy_sampleset(n=600, seed=1)
    test = toy_sampleset(n=600, seed=2)
    model = train_forest(train, n_trees=100, mtry=3, seed=0)
    oob = oob_error(model, train)
    holdout = evaluate(model, test).error_rate
    assert abs(oob - holdout) < 0.02


def test_forest_deterministic():
    data = toy_sampleset(n=200, seed=4)
    m1 = train_forest(data, n_trees=20, mtry=4, seed=11)
    m2 = train_forest(data, n_trees=20, mtry=4, seed=11)
    for t1, t2 in zip(m1.trees, m2.trees):
        assert np.array_equal(t1.feature, t2.feature)
        assert np.array_equal(t1.threshold, t2.threshold)
        assert np.array_equal(t1.counts, t2.counts)


def test_prediction_invariant_to_tree_order():
    data = toy_sampleset(n=300, seed=5)
    model = train_forest(data, n_trees=21, mtry=3, seed=7)
    probe = toy_sampleset(n=100, seed=6).X
    base = predict(model, probe)
    shuffled = type(model)(
        list(reversed(model.trees)), model.n_trees, model.mtry, model.seed
    )
    assert np.array_equal(predict(shuffled, probe), base)


def test_single_class_degenerate():
    data = toy_sampleset(n=50, seed=0)
    data.y[:] = 1
    with pytest.raises(DegenerateModelError):
        train_forest(data, n_trees=5, mtry=2, seed=0)


def test_tune_mtry_prefers_small_on_single_informative_feature():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(500, 10))
    y = (X[:, 0] > 0).astype(np.uint8)
    X[:, 1:] = rng.normal(size=(500, 9)) * 5  # pure noise
    data = SampleSet(X, y, np.full(500, "a", object), np.full(500, "slicing", object))
    best = tune_mtry(data, candidates=(2, 8), seed=0, probe_trees=60)
    assert best == 2


def test_model_roundtrip(tmp_path):
    data = toy_sampleset(n=150, seed=8)
    model = train_forest(data, n_trees=10, mtry=4, seed=3)
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    assert back.n_trees == 10 and back.mtry == 4 and back.seed == 3
    probe = toy_sampleset(n=80, seed=9).X
    assert np.array_equal(predict(back, probe), predict(model, probe))


# --- confusion stats ---------------------------------------------------------

@pytest.mark.parametrize(
    "fp,fn,total,rate",
    [(86, 168, 13670, 0.0186), (143, 300, 11998, 0.0369), (802, 1148, 44090, 0.0442)],
)
def test_error_rate_formula(fp, fn, total, rate):
    tp = (total - fp - fn) // 2
    tn = total - fp - fn - tp
    stats = ConfusionStats(tp, fp, tn, fn)
    assert stats.total == total
    assert stats.error_rate == (fp + fn) / total
    assert abs(stats.error_rate - rate) < 5e-5  # agrees with the reference rate to rounding


def test_perfect_predictor():
    data = toy_sampleset(n=200, seed=10)
    model = train_forest(data, n_trees=40, mtry=3, seed=1)
    stats = evaluate(model, data)
    assert stats.error_rate == 0.0
    assert stats.total == 200


# --- synthetic generator -----------------------------------------------------

def noiseless_spec(**kw):
    defaults = dict(
        id="q", cut_type="slicing", n_samples=400,
        contact_intervals=((1000.0, 2000.0),),
        contact_vibration=0.0, noise_proximity=0.0, noise_accel=0.0,
        noise_gyro=0.0, noise_mag=0.0,
    )
    defaults.update(kw)
    return SynthSpec(**defaults)


def test_zero_noise_exact_waveform():
    spec = noiseless_spec()
    r1 = synth_sensor_stream(spec, seed=1)
    r2 = synth_sensor_stream(spec, seed=99)
    assert np.array_equal(r1.features, r2.features)  # no randomness left
    prox = r1.features[:, 0]
    t = r1.t_ms
    assert (prox[(t >= 1000) & (t < 2000)] == spec.proximity_near).all()
    assert (prox[t < 1000 - spec.approach_ms] == spec.proximity_far).all()


def test_contact_column_matches_planted_intervals():
    spec = noiseless_spec(contact_intervals=((500.0, 800.0), (1200.0, 1210.0)))
    rep = synth_sensor_stream(spec, seed=0)
    expected = ((rep.t_ms >= 500) & (rep.t_ms < 800)) | (
        (rep.t_ms >= 1200) & (rep.t_ms < 1210)
    )
    assert np.array_equal(rep.contact.astype(bool), expected)


def test_overlapping_intervals_rejected():
    with pytest.raises(ValueError, match="overlap"):
        SynthSpec(id="x", cut_type="cubing", contact_intervals=((0.0, 100.0), (50.0, 200.0)))


def test_drift_increases_rwt_error():
    corpus = make_corpus(replicates_per_type=5, n_samples=500, drift=1.0, seed=4)
    reps, _ = preprocess(corpus)
    swt_tr, swt_te = build_split(reps, SplitScheme("swt", seed=0))
    rwt_tr, rwt_te = build_split(reps, SplitScheme("rwt", seed=0))
    swt = evaluate(train_forest(swt_tr, n_trees=60, mtry=4, seed=0), swt_te)
    rwt = evaluate(train_forest(rwt_tr, n_trees=60, mtry=4, seed=0), rwt_te)
    assert rwt.error_rate >= swt.error_rate
