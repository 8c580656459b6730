"""Two-stage adversarial training of an information-subtracting generator.

A generator maps the target variable to a representation z. Two critics
estimate lower bounds on I(target; condition, z) and on I(condition; z).
After a reconstruction warm-up, the generator descends
leak_weight * I(condition; z) - I(target; condition, z), so z keeps what
predicts the target while shedding what the condition already explains.
Critics train a few steps every epoch against a frozen generator; the
generator trains against frozen critics.

Optionally both sides see z through annealed additive Gaussian instance
noise (noise_start down to noise_floor). The noise smooths the adversarial
game so the leak critic cannot be escaped by translating the z manifold;
the representation itself stays a deterministic map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mi import Critic, critic_train_step, make_critic, smile_value
from ..numerics import (
    MlpModel,
    OptimizerState,
    as_matrix,
    backward,
    forward,
    init_mlp,
    make_rng,
    optimizer_step,
    spawn_rng,
)
from ..numerics.rng import SALT_BATCHES, SALT_NOISE, SALT_SHUFFLE


class SubtractionError(ValueError):
    """Invalid configuration or diverged training."""


@dataclass
class SubtractionConfig:
    z_dim: int = 10
    leak_weight: float = 1.0  # pressure on the condition term of the objective
    pretrain_epochs: int = 200
    total_epochs: int = 2000
    critic_steps: int = 2  # critic updates per epoch, every epoch
    predictor_epochs: int = 500
    batch_size: int = 256
    lr_generator: float = 1e-4
    lr_critic: float = 5e-4
    lr_predictor: float = 1e-4
    generator_hidden: tuple[int, ...] = (128, 128)
    critic_hidden: tuple[int, ...] = (128, 128)
    predictor_hidden: tuple[int, ...] = (128, 128)
    tau: float = 5.0
    clip_norm: float | None = 5.0
    hidden_activation: str = "relu"
    noise_start: float = 0.0  # instance-noise sigma at the start of subtraction
    noise_floor: float = 0.0  # sigma held from the end of the ramp onward
    noise_ramp_frac: float = 0.7  # fraction of subtract epochs spent ramping down
    seed: int = 0

    def violations(self) -> list[str]:
        bad = []
        if self.z_dim < 1:
            bad.append("z_dim must be >= 1")
        if self.leak_weight < 0:
            bad.append("leak_weight must be non-negative")
        if not 0 <= self.pretrain_epochs < self.total_epochs:
            bad.append("need 0 <= pretrain_epochs < total_epochs")
        if self.critic_steps < 0:
            bad.append("critic_steps must be >= 0")
        if self.predictor_epochs < 1:
            bad.append("predictor_epochs must be >= 1")
        if self.batch_size < 2:
            bad.append("batch_size must be >= 2")
        for name in ("lr_generator", "lr_critic", "lr_predictor"):
            if getattr(self, name) <= 0:
                bad.append(f"{name} must be positive")
        if self.tau <= 0:
            bad.append("tau must be positive")
        if self.noise_start < 0 or self.noise_floor < 0:
            bad.append("noise levels must be non-negative")
        elif self.noise_floor > self.noise_start:
            bad.append("noise_floor must not exceed noise_start")
        if not 0 <= self.noise_ramp_frac <= 1:
            bad.append("noise_ramp_frac must lie in [0, 1]")
        return bad

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise SubtractionError("; ".join(bad))


@dataclass
class EpochRecord:
    epoch: int
    stage: str  # pretrain | subtract
    recon_loss: float
    mi_full_nats: float
    mi_leak_nats: float
    generator_loss: float


@dataclass
class DiagnosticsTrace:
    records: list[EpochRecord] = field(default_factory=list)

    CSV_HEADER = "epoch,stage,recon_loss,mi_full_nats,mi_leak_nats,generator_loss"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.records:
            lines.append(f"{r.epoch},{r.stage},{r.recon_loss:.17g},"
                         f"{r.mi_full_nats:.17g},{r.mi_leak_nats:.17g},"
                         f"{r.generator_loss:.17g}")
        return "\n".join(lines) + "\n"


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        x = as_matrix(x, "standardizer input")
        std = np.std(x, axis=0)
        std[std == 0.0] = 1.0  # constant feature: shift only
        return cls(mean=np.mean(x, axis=0), std=std)

    def apply(self, x) -> np.ndarray:
        x = as_matrix(x, "standardizer input")
        if x.shape[1] != self.mean.size:
            raise SubtractionError(
                f"expected {self.mean.size} features, got {x.shape[1]}")
        return (x - self.mean) / self.std


@dataclass
class TrainedSubtractor:
    generator: MlpModel
    reconstructor: MlpModel
    critic_full: Critic  # blocks (target, condition, representation)
    critic_leak: Critic  # blocks (condition, representation)
    std_target: Standardizer
    std_condition: Standardizer
    trace: DiagnosticsTrace
    config: SubtractionConfig

    def represent(self, target_raw) -> np.ndarray:
        out, _ = forward(self.generator, self.std_target.apply(target_raw))
        return out

    def _mi(self, critic: Critic, fixed: list[np.ndarray], tail: list[np.ndarray],
            perms: int, seed: int) -> float:
        rng = make_rng(seed)
        joint = fixed + tail
        t_j, _ = critic.scores(joint)
        values = []
        for _ in range(max(1, perms)):
            p = rng.permutation(t_j.size)
            t_m, _ = critic.scores(fixed + [b[p] for b in tail])
            values.append(smile_value(t_j, t_m, self.config.tau))
        return float(np.mean(values))

    def mi_full_nats(self, condition_raw, target_raw, perms: int = 4,
                     seed: int = 0) -> float:
        """Bound on I(target; condition, representation) over the given rows."""
        ty = self.std_target.apply(target_raw)
        tx = self.std_condition.apply(condition_raw)
        z, _ = forward(self.generator, ty)
        return self._mi(self.critic_full, [ty], [tx, z], perms, seed)

    def mi_leak_nats(self, condition_raw, target_raw, perms: int = 4,
                     seed: int = 0) -> float:
        """Bound on I(condition; representation) over the given rows."""
        ty = self.std_target.apply(target_raw)
        tx = self.std_condition.apply(condition_raw)
        z, _ = forward(self.generator, ty)
        return self._mi(self.critic_leak, [tx], [z], perms, seed)


def _net_seed(seed: int, index: int) -> int:
    return (int(seed) * 1000003 + index) % (2 ** 31 - 1)


class SubtractionTrainer:
    """Owns the four networks and the two training stages."""

    def __init__(self, config: SubtractionConfig, condition, target) -> None:
        config.validate()
        self.config = config
        x = as_matrix(condition, "condition")
        y = as_matrix(target, "target")
        if x.shape[0] != y.shape[0]:
            raise SubtractionError(
                f"row-count mismatch: condition {x.shape[0]}, target {y.shape[0]}")
        if x.shape[0] < config.batch_size:
            raise SubtractionError(
                f"batch_size {config.batch_size} exceeds {x.shape[0]} rows")
        self.std_condition = Standardizer.fit(x)
        self.std_target = Standardizer.fit(y)
        self.condition = self.std_condition.apply(x)
        self.target = self.std_target.apply(y)
        self.n_rows = x.shape[0]

        c = config
        y_dim, x_dim, z_dim = y.shape[1], x.shape[1], c.z_dim
        act = c.hidden_activation
        self.generator = init_mlp([y_dim, *c.generator_hidden, z_dim],
                                  activation=act, seed=_net_seed(c.seed, 1))
        self.reconstructor = init_mlp([z_dim, *c.generator_hidden, y_dim],
                                      activation=act, seed=_net_seed(c.seed, 2))
        self.critic_full = make_critic(
            [("target", y_dim), ("condition", x_dim), ("repr", z_dim)],
            hidden=c.critic_hidden, activation=act, seed=_net_seed(c.seed, 3))
        self.critic_leak = make_critic(
            [("condition", x_dim), ("repr", z_dim)],
            hidden=c.critic_hidden, activation=act, seed=_net_seed(c.seed, 4))

        def adam(lr):
            return OptimizerState(kind="adam", learning_rate=lr,
                                  clip_norm=c.clip_norm)

        self.opt_generator = adam(c.lr_generator)
        self.opt_reconstructor = adam(c.lr_generator)
        self.opt_critic_full = adam(c.lr_critic)
        self.opt_critic_leak = adam(c.lr_critic)

        self.batch_rng = spawn_rng(c.seed, SALT_BATCHES)
        self.shuffle_rng = spawn_rng(c.seed, SALT_SHUFFLE)
        self.noise_rng = spawn_rng(c.seed, SALT_NOISE)
        self.trace = DiagnosticsTrace()

    def stage_of(self, epoch: int) -> str:
        return "pretrain" if epoch < self.config.pretrain_epochs else "subtract"

    def noise_sigma(self, epoch: int) -> float:
        """Instance-noise level for this epoch's critic and generator updates."""
        c = self.config
        if c.noise_start <= 0.0 or self.stage_of(epoch) == "pretrain":
            return 0.0
        ramp = max(1, round(c.noise_ramp_frac
                            * (c.total_epochs - c.pretrain_epochs)))
        frac = min(1.0, (epoch - c.pretrain_epochs) / ramp)
        return c.noise_floor + (c.noise_start - c.noise_floor) * (1.0 - frac)

    def sample_batch(self) -> np.ndarray:
        return self.batch_rng.choice(self.n_rows, size=self.config.batch_size,
                                     replace=False)

    def pretrain_step(self, target_batch: np.ndarray) -> float:
        """One reconstruction step updating generator and reconstructor."""
        ty = target_batch
        z, cache_g = forward(self.generator, ty)
        out, cache_r = forward(self.reconstructor, z)
        diff = out - ty
        loss = float(np.mean(diff * diff))
        if not np.isfinite(loss):
            raise SubtractionError("reconstruction loss diverged")
        grad_out = 2.0 * diff / diff.size
        grads_r, grad_z = backward(self.reconstructor, cache_r, grad_out)
        grads_g, _ = backward(self.generator, cache_g, grad_z)
        optimizer_step(self.reconstructor, grads_r, self.opt_reconstructor)
        optimizer_step(self.generator, grads_g, self.opt_generator)
        return loss

    def critic_step(self, condition_batch: np.ndarray,
                    target_batch: np.ndarray,
                    noise: np.ndarray | None = None) -> tuple[float, float]:
        """One maximizing update of each critic; generator untouched.

        Returns the post-update bound values (nats) for the full and leak
        critics.
        """
        tx, ty = condition_batch, target_batch
        z, _ = forward(self.generator, ty)
        if noise is not None:
            z = z + noise
        tau = self.config.tau

        perm = self.shuffle_rng.permutation(z.shape[0])
        mi_full = critic_train_step(
            self.critic_full, [ty, tx, z], [ty, tx[perm], z[perm]],
            self.opt_critic_full, tau)

        perm = self.shuffle_rng.permutation(z.shape[0])
        mi_leak = critic_train_step(
            self.critic_leak, [tx, z], [tx, z[perm]],
            self.opt_critic_leak, tau)
        return mi_full, mi_leak

    def estimate_batch(self, condition_batch: np.ndarray,
                       target_batch: np.ndarray) -> tuple[float, float]:
        """Current bound values without updating anything."""
        tx, ty = condition_batch, target_batch
        z, _ = forward(self.generator, ty)
        tau = self.config.tau
        perm = self.shuffle_rng.permutation(z.shape[0])
        t_j, _ = self.critic_full.scores([ty, tx, z])
        t_m, _ = self.critic_full.scores([ty, tx[perm], z[perm]])
        mi_full = smile_value(t_j, t_m, tau)
        perm = self.shuffle_rng.permutation(z.shape[0])
        t_j, _ = self.critic_leak.scores([tx, z])
        t_m, _ = self.critic_leak.scores([tx, z[perm]])
        mi_leak = smile_value(t_j, t_m, tau)
        return mi_full, mi_leak

    def reconstruction_loss(self, target_batch: np.ndarray) -> float:
        z, _ = forward(self.generator, target_batch)
        out, _ = forward(self.reconstructor, z)
        return float(np.mean((out - target_batch) ** 2))

    def subtraction_step(self, condition_batch: np.ndarray,
                         target_batch: np.ndarray,
                         noise: np.ndarray | None = None) -> float:
        """One generator step; critics frozen.

        The generator loss is leak_weight * mean(T_leak) - mean(T_full)
        over paired rows. A trained critic's score approximates the
        pointwise log density ratio, so the means move the two information
        terms in opposite directions without dragging the partition terms
        (and their clamp) into the generator's gradient.
        """
        tx, ty = condition_batch, target_batch
        lam = self.config.leak_weight
        z, cache_g = forward(self.generator, ty)
        if noise is not None:
            z = z + noise  # additive, so grad_z passes through unchanged
        n = z.shape[0]

        t_full, cache_full = self.critic_full.scores([ty, tx, z])
        grad_z = self.critic_full.input_grads(
            cache_full, np.full(n, -1.0 / n))[2]
        loss = -float(np.mean(t_full))
        if lam != 0.0:
            t_leak, cache_leak = self.critic_leak.scores([tx, z])
            grad_z += self.critic_leak.input_grads(
                cache_leak, np.full(n, lam / n))[1]
            loss += lam * float(np.mean(t_leak))

        if not np.isfinite(loss):
            raise SubtractionError("generator loss diverged")
        grads_g, _ = backward(self.generator, cache_g, grad_z)
        optimizer_step(self.generator, grads_g, self.opt_generator)
        return loss

    def run_epoch(self, epoch: int) -> EpochRecord:
        idx = self.sample_batch()
        tx, ty = self.condition[idx], self.target[idx]
        stage = self.stage_of(epoch)
        sigma = self.noise_sigma(epoch)

        def draw():
            # One draw per phase per epoch; critic steps share theirs.
            if sigma <= 0.0:
                return None
            return sigma * self.noise_rng.normal(
                size=(len(idx), self.config.z_dim))

        if self.config.critic_steps > 0:
            critic_noise = draw()
            for _ in range(self.config.critic_steps):
                mi_full, mi_leak = self.critic_step(tx, ty, critic_noise)
        else:
            mi_full, mi_leak = self.estimate_batch(tx, ty)

        if stage == "pretrain":
            recon = self.pretrain_step(ty)
            gen_loss = self.config.leak_weight * mi_leak - mi_full
        else:
            gen_loss = self.subtraction_step(tx, ty, draw())
            recon = self.reconstruction_loss(ty)

        record = EpochRecord(epoch=epoch, stage=stage, recon_loss=recon,
                             mi_full_nats=mi_full, mi_leak_nats=mi_leak,
                             generator_loss=gen_loss)
        self.trace.records.append(record)
        return record

    def train(self, log_every: int = 0, log=print) -> TrainedSubtractor:
        for epoch in range(self.config.total_epochs):
            record = self.run_epoch(epoch)
            if log_every and (epoch % log_every == 0
                              or epoch == self.config.total_epochs - 1):
                log(f"epoch {record.epoch:5d} [{record.stage}] "
                    f"recon={record.recon_loss:.4f} "
                    f"full={record.mi_full_nats:.4f} "
                    f"leak={record.mi_leak_nats:.4f} "
                    f"loss={record.generator_loss:.4f}")
        return TrainedSubtractor(
            generator=self.generator, reconstructor=self.reconstructor,
            critic_full=self.critic_full, critic_leak=self.critic_leak,
            std_target=self.std_target, std_condition=self.std_condition,
            trace=self.trace, config=self.config)


def train_information_subtraction(config: SubtractionConfig, condition,
                                  target, log_every: int = 0,
                                  log=print) -> TrainedSubtractor:
    """Run the full two-stage loop and return the trained networks with trace."""
    return SubtractionTrainer(config, condition, target).train(log_every, log)


def generate_representation(subtractor: TrainedSubtractor, target_raw) -> np.ndarray:
    """Deterministic representation of each row of the target variable."""
    return subtractor.represent(target_raw)
