import pytest
import torch

from trainer_support import requires_solver
from gnls_trainer import (CurriculumStage, SelectorNet, TrainConfig, base_rate,
                          evaluate_precision, load_dataset, smoothed, train)
from gnls_trainer.train import smoothed_strictly_decreasing


@requires_solver
class TestTrain:
    def test_loss_drops_on_small_set(self, mini_dataset):
        examples = load_dataset(mini_dataset)
        cfg = TrainConfig(epochs=30, batch_graphs=4, n_layers=2, hidden=16,
                          seed=0)
        net, hist = train(cfg, [CurriculumStage(n=12, examples=examples)])
        losses = hist.stage_losses[0]
        assert len(losses) == 30
        assert losses[-1] < losses[0]

    def test_curriculum_continues_from_stage_one_weights(self, mini_dataset):
        # both stages use the same dataset: if stage 2 started from a fresh
        # init, its first epoch would regress to the first stage-1 epoch's
        # loss level instead of continuing near the converged one
        examples = load_dataset(mini_dataset)
        cfg = TrainConfig(epochs=20, batch_graphs=4, n_layers=2, hidden=16,
                          seed=0)
        stages = [CurriculumStage(n=12, examples=examples),
                  CurriculumStage(n=12, examples=examples)]
        _, hist = train(cfg, stages)
        assert len(hist.stage_losses) == 2
        first_stage_start = hist.stage_losses[0][0]
        stage1_end = hist.stage_losses[0][-1]
        stage2_start = hist.stage_losses[1][0]
        assert stage2_start < first_stage_start
        assert stage2_start < 2 * stage1_end + 0.05

    def test_stage_order_enforced(self, mini_dataset):
        examples = load_dataset(mini_dataset)
        cfg = TrainConfig(epochs=1)
        stages = [CurriculumStage(n=100, examples=examples),
                  CurriculumStage(n=12, examples=examples)]
        with pytest.raises(ValueError, match="increasing"):
            train(cfg, stages)

    def test_evaluate_precision_bounds(self, mini_dataset):
        examples = load_dataset(mini_dataset)
        torch.manual_seed(0)
        net = SelectorNet(n_layers=2, hidden=16, n_mlp_layers=2)
        precision, recall = evaluate_precision(net, examples, t=0.5)
        assert 0.0 <= precision <= 1.0
        assert 0.0 <= recall <= 1.0

    def test_all_positive_predictor_has_base_rate_precision(self, mini_dataset):
        examples = load_dataset(mini_dataset)
        torch.manual_seed(0)
        net = SelectorNet(n_layers=2, hidden=16, n_mlp_layers=2)
        precision, recall = evaluate_precision(net, examples, t=0.0)
        assert recall == 1.0
        assert precision == pytest.approx(base_rate(examples))

    def test_threshold_sweep_monotone_positive_count(self, mini_dataset):
        from gnls_trainer.evaluate import predicted_positive_count
        examples = load_dataset(mini_dataset)[:3]
        torch.manual_seed(1)
        net = SelectorNet(n_layers=2, hidden=16, n_mlp_layers=2)
        counts = [predicted_positive_count(net, examples, t)
                  for t in (0.0, 0.3, 0.6, 0.9)]
        assert counts == sorted(counts, reverse=True)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(lr=0)

    def test_smoothed_helper(self):
        values = [5.0, 4.0, 3.0, 2.0, 1.0]
        s = smoothed(values, window=2)
        assert s == [5.0, 4.5, 3.5, 2.5, 1.5]
        assert smoothed_strictly_decreasing(values, window=2, stride=2)
        assert not smoothed_strictly_decreasing([1.0] * 10, window=2, stride=2)
