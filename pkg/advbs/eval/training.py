from typing import List, Optional

import numpy as np

from advbs.attacks import Attack
from advbs.errors import BudgetExceeded, InvalidInput
from advbs.models.dataset import Dataset
from advbs.models.mlp import MlpModel, TrainConfig
from advbs.types import TrainingMode
from advbs.utils import LoggingBase

# gradients per image a reference attack may spend when forging training samples
TRAINING_ATTACK_BUDGET = 20


class AdversarialTrainer(LoggingBase):
    """
    Every epoch forges adversarial images against a frozen copy of the current
    model and trains one pass over the clean and forged images together.
    """

    def __init__(self, attack: Attack, cfg: TrainConfig, budget: int = TRAINING_ATTACK_BUDGET):
        super().__init__()
        if attack.budget() > budget:
            raise BudgetExceeded(
                f"Attack {attack.name()} needs {attack.budget()} gradients per image, "
                f"at most {budget} allowed"
            )
        self._attack = attack
        self._cfg = cfg
        self._budget = budget

    @staticmethod
    def typename() -> str:
        return "Eval.AdversarialTrainer"

    def forge(self, model: MlpModel, dataset: Dataset) -> Dataset:
        frozen = model.copy()
        images = np.empty_like(dataset.images)
        for idx in range(len(dataset)):
            outcome = self._attack.run(frozen, dataset.images[idx], int(dataset.labels[idx]))
            if outcome.grads_used > self._budget:
                raise BudgetExceeded(
                    f"Attack {self._attack.name()} used {outcome.grads_used} gradients"
                )
            images[idx] = outcome.adversarial
        return Dataset(images, dataset.labels)

    def train(
        self,
        model: MlpModel,
        train_set: Dataset,
        epochs: int,
        mode: TrainingMode = TrainingMode.FINETUNE,
        history: Optional[List[float]] = None,
    ) -> MlpModel:
        if epochs < 0:
            raise InvalidInput(f"Number of epochs must be nonnegative, got {epochs}")
        if epochs == 0:
            return model.copy()

        if mode == TrainingMode.SCRATCH:
            current = MlpModel.initialize(
                model.input_dim, model.hidden_sizes, model.num_classes, self._cfg.seed
            )
        else:
            current = model.copy()
        rng = np.random.default_rng(self._cfg.seed)
        for epoch in range(epochs):
            forged = self.forge(current, train_set)
            loss = current._train_epoch(
                train_set.concatenate(forged), self._cfg.batch_size, self._cfg.learning_rate, rng
            )
            self.logging.info(f"Epoch {epoch}: training loss {loss}")
            if history is not None:
                history.append(loss)
        current._epochs += epochs
        current._seed = self._cfg.seed
        return current


def adversarial_training(
    model: MlpModel,
    train_set: Dataset,
    reference_attack: Attack,
    epochs: int,
    mode: TrainingMode = TrainingMode.FINETUNE,
    cfg: Optional[TrainConfig] = None,
) -> MlpModel:
    trainer = AdversarialTrainer(reference_attack, cfg if cfg is not None else TrainConfig())
    return trainer.train(model, train_set, epochs, mode)
