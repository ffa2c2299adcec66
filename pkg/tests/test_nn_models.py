import numpy as np
import pytest

from imbkit import CNNClassifier, DNNClassifier, TrainConfig
from imbkit.exceptions import ShapeMismatch
from imbkit.nn import Adam, Network, cnn_spec, dnn_spec, train
from imbkit.nn.models import model_spec


def toy_separable(rng, n=20, margin=4.0):
    n1 = n // 2
    X = np.vstack(
        [rng.normal(size=(n - n1, 2)) * 0.3 - margin / 2,
         rng.normal(size=(n1, 2)) * 0.3 + margin / 2]
    )
    y = np.array([0] * (n - n1) + [1] * n1)
    return X, y


class TestAdam:
    def test_first_step_magnitude(self):
        opt = Adam(learning_rate=0.001)
        params = [{"w": np.array([1.0])}]
        grads = [{"w": np.array([1.0])}]
        opt.step(params, grads)
        delta = params[0]["w"][0] - 1.0
        assert abs(delta + 0.001) <= 1e-8

    def test_zero_gradient_no_move(self):
        opt = Adam()
        params = [{"w": np.array([2.0, 3.0])}]
        opt.step(params, [{"w": np.zeros(2)}])
        np.testing.assert_array_equal(params[0]["w"], [2.0, 3.0])

    def test_deterministic(self, rng):
        g = rng.normal(size=4)
        outs = []
        for _ in range(2):
            opt = Adam()
            params = [{"w": np.ones(4)}]
            for _ in range(5):
                opt.step(params, [{"w": g.copy()}])
            outs.append(params[0]["w"].copy())
        np.testing.assert_array_equal(outs[0], outs[1])


class TestSpecs:
    def test_dnn_layer_plan(self):
        spec = dnn_spec(9)
        assert spec.layers == (
            ("dense", 9, 64),
            ("relu",),
            ("batchnorm", 64),
            ("dense", 64, 64),
            ("relu",),
            ("batchnorm", 64),
            ("dropout", 0.3),
            ("dense", 64, 1),
        )

    @pytest.mark.parametrize("d", range(3, 21))
    def test_cnn_flatten_width(self, d):
        spec = cnn_spec(d)
        padded = max(d, 4)
        dense_in = dict.fromkeys(["x"])  # placeholder to keep flake quiet
        flat = [l for l in spec.layers if l[0] == "dense"][0][1]
        assert flat == 4 * (padded - 3)

    def test_cnn_d7_matches_declared_16(self):
        flat = [l for l in cnn_spec(7).layers if l[0] == "dense"][0][1]
        assert flat == 16

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            model_spec("rnn", 4)


class TestNetwork:
    def test_init_deterministic(self):
        a = Network(dnn_spec(5), seed=123)
        b = Network(dnn_spec(5), seed=123)
        for la, lb in zip(a.layers, b.layers):
            for k in la.params():
                np.testing.assert_array_equal(la.params()[k], lb.params()[k])

    def test_forward_shapes(self, rng):
        for d in (3, 4, 7, 12):
            for spec in (dnn_spec(d), cnn_spec(d)):
                net = Network(spec, seed=0)
                out = net.forward(rng.normal(size=(6, d)), train=False)
                assert out.shape == (6, 1)

    def test_eval_deterministic_bitwise(self, rng):
        net = Network(cnn_spec(5), seed=7)
        x = rng.normal(size=(10, 5))
        a = net.predict_proba(x)
        b = net.predict_proba(x)
        np.testing.assert_array_equal(a, b)

    def test_width_mismatch(self, rng):
        net = Network(dnn_spec(4), seed=0)
        with pytest.raises(ShapeMismatch):
            net.forward(rng.normal(size=(3, 5)), train=False)

    def test_state_round_trip(self, rng, tmp_path):
        X = rng.normal(size=(12, 4))
        y = np.array([0, 1] * 6)
        net, _ = train(dnn_spec(4), X, y, TrainConfig(epochs=20), seed=3)
        path = tmp_path / "model.json"
        net.save(str(path))
        restored = Network.load(str(path))
        np.testing.assert_array_equal(net.predict_proba(X), restored.predict_proba(X))


class TestTrain:
    def test_toy_separable_perfect_fit(self, rng):
        X, y = toy_separable(rng)
        net, history = train(dnn_spec(2), X, y, TrainConfig(epochs=200), seed=1)
        predictions = (net.predict_proba(X) >= 0.5).astype(int)
        assert (predictions == y).all()
        assert len(history) == 200

    def test_zero_epochs_returns_initial_state(self, rng):
        X, y = toy_separable(rng)
        fresh = Network(dnn_spec(2), seed=9)
        net, history = train(dnn_spec(2), X, y, TrainConfig(epochs=0), seed=9)
        assert history == []
        for la, lb in zip(net.layers, fresh.layers):
            for k in la.params():
                np.testing.assert_array_equal(la.params()[k], lb.params()[k])

    def test_history_finite(self, rng):
        X, y = toy_separable(rng)
        _, history = train(cnn_spec(2), X, y, TrainConfig(epochs=50), seed=2)
        assert np.isfinite(history).all()

    def test_loss_mostly_decreasing_late(self, rng):
        # CNN has no dropout, so its full-batch loss sequence is noise-free
        X, y = toy_separable(rng, n=30)
        _, history = train(cnn_spec(2), X, y, TrainConfig(epochs=300), seed=4)
        tail = np.asarray(history[len(history) // 2:])
        increases = (np.diff(tail) > 0).sum()
        assert increases <= 0.05 * len(tail)

    def test_dnn_loss_trend_decreases(self, rng):
        # dropout redraws masks every epoch, so the DNN is checked at the
        # level of window means rather than single steps
        X, y = toy_separable(rng, n=30)
        _, history = train(dnn_spec(2), X, y, TrainConfig(epochs=300), seed=4)
        quarters = np.array_split(np.asarray(history), 4)
        means = [q.mean() for q in quarters]
        assert means[-1] < means[0]
        assert means[-1] < means[1]

    def test_non_finite_loss_aborts_with_epoch(self, rng, monkeypatch):
        import imbkit.nn.models as models
        from imbkit.exceptions import NonFiniteLoss

        calls = {"n": 0}
        real = models.focal_loss

        def poisoned(logits, labels, alpha, gamma):
            calls["n"] += 1
            if calls["n"] == 4:
                return float("nan"), np.zeros_like(logits)
            return real(logits, labels, alpha, gamma)

        monkeypatch.setattr(models, "focal_loss", poisoned)
        X, y = toy_separable(rng)
        with pytest.raises(NonFiniteLoss) as excinfo:
            train(dnn_spec(2), X, y, TrainConfig(epochs=10), seed=0)
        assert excinfo.value.epoch == 3

    def test_state_version_rejected(self, rng, tmp_path):
        net = Network(dnn_spec(3), seed=0)
        state = net.to_state()
        state["version"] = 99
        with pytest.raises(ValueError):
            Network.from_state(state)

    def test_training_deterministic(self, rng):
        X, y = toy_separable(rng)
        cfg = TrainConfig(epochs=40)
        net_a, hist_a = train(dnn_spec(2), X, y, cfg, seed=5)
        net_b, hist_b = train(dnn_spec(2), X, y, cfg, seed=5)
        assert hist_a == hist_b
        np.testing.assert_array_equal(net_a.predict_proba(X), net_b.predict_proba(X))


class TestClassifierEstimators:
    def test_fit_predict_dnn(self, rng):
        X, y = toy_separable(rng)
        clf = DNNClassifier(epochs=150, seed=0)
        assert clf.fit(X, y) is clf
        assert (clf.predict(X) == y).all()
        proba = clf.predict_proba(X)
        assert proba.shape == (len(y),)
        assert ((proba >= 0) & (proba <= 1)).all()

    def test_fit_predict_cnn_with_padding(self, rng):
        X, y = toy_separable(rng)  # d = 2 exercises the pad-to-4 path
        clf = CNNClassifier(epochs=200, seed=0)
        clf.fit(X, y)
        assert (clf.predict(X) == y).mean() >= 0.9

    def test_get_params_round_trip(self):
        clf = CNNClassifier(epochs=123, learning_rate=0.01, seed=9)
        params = clf.get_params()
        assert params["epochs"] == 123
        clone = CNNClassifier(**params)
        assert clone.get_params() == params

    def test_probabilities_monotone_in_logits(self, rng):
        X, y = toy_separable(rng)
        clf = DNNClassifier(epochs=50, seed=1).fit(X, y)
        logits = clf.network_.forward(X, train=False).ravel()
        proba = clf.predict_proba(X)
        order = np.argsort(logits)
        assert (np.diff(proba[order]) >= 0).all()
