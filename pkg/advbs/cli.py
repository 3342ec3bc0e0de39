import csv
import functools
import json
import logging
import math
import os
from typing import Optional

import click
import numpy as np

import advbs
from advbs.attacks import AttackOutcome
from advbs.config import (
    BenchCommandConfig,
    QuantPredCommandConfig,
    Trace2DCommandConfig,
    TrainCommandConfig,
)
from advbs.core import QuantGrid, as_image, clip01, round_to_grid
from advbs.errors import AdvBSError, ConfigError
from advbs.eval import (
    BenchmarkRunner,
    aggregate_multi_epsilon,
    boundary_crossing_stats,
    operating_characteristic,
)
from advbs.models import MlpModel, Toy2DModel, train_sgd
from advbs.models.mlp import TrainConfig
from advbs.quantization import (
    QuantPredictorInput,
    expected_sq_distortion_exact,
    expected_sq_distortion_highres,
    mc_quantized_distortion,
)
from advbs.regression import regression_suite
from advbs.utils import (
    catch_interrupt,
    create_output,
    format_float,
    global_logging,
    serialize,
    update_nested_dict,
)

advbs_client: Optional[advbs.AdvBS] = None


class CommandError(click.ClickException):
    exit_code = 2


class ExceptionProcesser(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except AdvBSError as e:
            logging.error(e)
            raise CommandError(f"{type(e).__name__}: {e}") from e


def common_params(func):
    @click.option(
        "--config",
        required=True,
        type=click.Path(readable=True),
        help="Location of the run config.",
    )
    @click.option("--out", default="out", help="Output directory for results.")
    @click.option("--seed", default=None, type=int, help="Override the seed of the config.")
    @click.option("--jobs", default=None, type=int, help="Number of parallel workers.")
    @click.option("--log-file", default=None, help="Write the log into this file of --out.")
    @click.option("--verbose/--no-verbose", default=False, help="Verbose output.")
    @click.option(
        "--preserve-out/--no-preserve-out",
        default=True,
        help="Preserve current results in output directory.",
    )
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def parse_common_params(config, out, seed, jobs, log_file, verbose, preserve_out):

    global advbs_client
    if not os.path.isfile(config):
        raise ConfigError(f"Config file {config} does not exist")
    with open(config, "r") as in_f:
        try:
            config_obj = json.load(in_f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {config} is not valid JSON: {e}")

    output_dir = create_output(out, preserve_out)
    logging_filename = os.path.join(output_dir, log_file) if log_file else None
    advbs_client = advbs.AdvBS(output_dir, verbose, logging_filename)
    advbs_client.logging.info(f"Created experiment output at {output_dir}")

    # CLI overrides JSON options
    update_nested_dict(config_obj, ["seed"], seed)
    update_nested_dict(config_obj, ["jobs"], jobs)

    global_logging(verbose)
    catch_interrupt()

    return config_obj, output_dir, advbs_client


@click.group(cls=ExceptionProcesser)
def cli():
    pass


@cli.command()
@common_params
def train(**kwargs):
    """
    Train an MLP classifier and write the model file with a training log.
    """
    config, output_dir, client = parse_common_params(**kwargs)
    config.pop("jobs", None)
    cfg = TrainCommandConfig.deserialize(config, client.config)
    dataset = client.get_dataset(cfg.dataset)
    if cfg.test_fraction is not None:
        test_set, train_set = dataset.split(cfg.test_fraction, cfg.seed)
    else:
        train_set, test_set = dataset, None

    train_cfg = TrainConfig.deserialize(cfg.training)
    num_classes = int(np.max(dataset.labels)) + 1
    model = MlpModel.initialize(
        dataset.input_dim, train_cfg.hidden_sizes, num_classes, train_cfg.seed
    )
    history: list = []
    trained = train_sgd(model, train_set, train_cfg, history)

    model_path = os.path.join(output_dir, cfg.model_file)
    trained.save(model_path)
    train_accuracy = trained.accuracy(train_set)
    test_accuracy = trained.accuracy(test_set) if test_set is not None else None
    log = {
        "config": cfg.serialize(),
        "losses": history,
        "train_accuracy": train_accuracy,
        "test_accuracy": test_accuracy,
        "accuracy": test_accuracy if test_accuracy is not None else train_accuracy,
    }
    with open(os.path.join(output_dir, "training.json"), "w") as out_f:
        out_f.write(serialize(log))
        out_f.write("\n")
    client.logging.info(f"Saved model to {model_path}, accuracy {log['accuracy']}")


@cli.command()
@common_params
def bench(**kwargs):
    """
    Run one attack over the correctly classified images of a dataset.
    """
    config, output_dir, client = parse_common_params(**kwargs)
    cfg = BenchCommandConfig.deserialize(config, client.config)
    model = client.get_model(cfg.model)
    dataset = client.get_dataset(cfg.dataset)
    d_upp = cfg.d_upp if cfg.d_upp is not None else client.config.d_upp

    runner = BenchmarkRunner(model, dataset, cfg.jobs, d_upp)
    runner.logging_handlers = client.generate_logging_handlers()
    if cfg.epsilons:
        reports = []
        for epsilon in cfg.epsilons:
            attack = client.get_attack(cfg.attack, {**cfg.params, "epsilon": epsilon}, cfg.quantize)
            reports.append(runner.run(attack, cfg.seed))
        report = aggregate_multi_epsilon(reports, cfg.epsilons)
    else:
        attack = client.get_attack(cfg.attack, cfg.params, cfg.quantize)
        report = runner.run(attack, cfg.seed)
    report.config = cfg.serialize()

    base = os.path.join(output_dir, cfg.attack)
    report.write_csv(f"{base}.csv")
    report.write_json(f"{base}.json")
    operating_characteristic(report.records).write_csv(f"{base}_oc.csv")
    client.logging.info(
        f"Attack {cfg.attack}: P_suc {report.p_suc}, D_bar {report.d_bar}, "
        f"P_upp {report.p_upp} at D_upp {report.d_upp}"
    )


@cli.command()
@common_params
def quantpred(**kwargs):
    """
    Predicted distortion after quantization against the update norm rho.
    """
    config, output_dir, client = parse_common_params(**kwargs)
    cfg = QuantPredCommandConfig.deserialize(config, client.config)

    columns = ["rho", "sqrt_exact", "sqrt_highres"]
    if cfg.samples > 0:
        columns.append("sqrt_mc")
    path = os.path.join(output_dir, "quantpred.csv")
    with open(path, "w", newline="") as out_f:
        writer = csv.writer(out_f, delimiter=",", lineterminator="\n")
        writer.writerow(columns)
        for rho in cfg.rho:
            q = QuantPredictorInput(cfg.n, cfg.delta, rho)
            row = [
                format_float(rho),
                format_float(math.sqrt(expected_sq_distortion_exact(q))),
                format_float(math.sqrt(expected_sq_distortion_highres(q))),
            ]
            if cfg.samples > 0:
                estimate = mc_quantized_distortion(q, cfg.samples, cfg.seed, cfg.jobs)
                row.append(format_float(math.sqrt(estimate)))
            writer.writerow(row)
            client.logging.debug(f"rho {rho}: {row[1:]}")
    client.logging.info(f"Saved {len(cfg.rho)} predictions to {path}")


def _write_trace(writer, start_idx: int, outcome: AttackOutcome):
    for idx, entry in enumerate(outcome.trace or []):
        writer.writerow(
            [
                str(start_idx),
                str(idx),
                format_float(entry.iterate[0]),
                format_float(entry.iterate[1]),
                format_float(entry.loss),
                "true" if entry.adversarial else "false",
            ]
        )


def _write_probability_grid(path: str, model: Toy2DModel, resolution: int):
    axis = np.linspace(0.0, 1.0, resolution)
    with open(path, "w", newline="") as out_f:
        writer = csv.writer(out_f, delimiter=",", lineterminator="\n")
        writer.writerow(["y0", "y1", "p0", "p1"])
        for y0 in axis:
            for y1 in axis:
                probs = model.forward(np.array([y0, y1]))
                writer.writerow([format_float(v) for v in (y0, y1, probs[0], probs[1])])


@cli.command()
@common_params
def trace2d(**kwargs):
    """
    Iterate paths of the attacks on the 2D toy classifier with its probability grid.
    """
    config, output_dir, client = parse_common_params(**kwargs)
    config.pop("jobs", None)
    cfg = Trace2DCommandConfig.deserialize(config, client.config)
    toy = client.get_toy_model(cfg.toy)
    grid: Optional[QuantGrid] = client.config.grid if cfg.quantize else None

    summary: dict = {"config": cfg.serialize(), "attacks": {}}
    for name in cfg.attacks:
        attack = client.get_attack(name, cfg.params[name], cfg.quantize)
        runs = []
        with open(os.path.join(output_dir, f"trace_{name}.csv"), "w", newline="") as out_f:
            writer = csv.writer(out_f, delimiter=",", lineterminator="\n")
            writer.writerow(["start", "iter", "y0", "y1", "loss", "adversarial"])
            for start_idx, start in enumerate(cfg.starts):
                x = clip01(as_image(start))
                if grid is not None:
                    x = round_to_grid(x, grid)
                label = toy.predict(x)
                outcome = attack.run(toy, x, label, record_trace=True)
                _write_trace(writer, start_idx, outcome)
                crossings, fraction = boundary_crossing_stats(outcome.trace or [])
                runs.append(
                    {
                        "start": start_idx,
                        "success": outcome.success,
                        "distortion": outcome.distortion_l2,
                        "crossings": crossings,
                        "adversarial_fraction": fraction,
                    }
                )
                client.logging.info(
                    f"{name} from start {start_idx}: {crossings} boundary crossings, "
                    f"adversarial fraction {fraction}"
                )
        summary["attacks"][name] = runs

    _write_probability_grid(os.path.join(output_dir, "grid.csv"), toy, cfg.resolution)
    with open(os.path.join(output_dir, "trace2d.json"), "w") as out_f:
        out_f.write(serialize(summary))
        out_f.write("\n")


@cli.group()
def experiment():
    pass


@experiment.command("invoke")
@click.argument("experiment", type=str)
@common_params
def experiment_invoke(experiment, **kwargs):
    """
    Run one of the experiments: quantization-ablation, adversarial-training,
    parameter-study or speed-distortion.
    """
    config, output_dir, client = parse_common_params(**kwargs)
    experiment = client.get_experiment(experiment, config)
    experiment.prepare(client)
    experiment.run()


@cli.command()
@click.option("--attack-name", default=None, type=str, help="Run only the selected attack.")
@click.option("--out", default="regression-output", help="Output directory for results.")
@click.option("--verbose/--no-verbose", default=False, help="Verbose output.")
@click.pass_context
def regression(ctx, attack_name, out, verbose):
    """
    Integrity checks of every attack, run concurrently.
    """
    global advbs_client
    global_logging(verbose)
    advbs_client = advbs.AdvBS(create_output(out), verbose)
    if attack_name is not None:
        from advbs.types import Attacks

        Attacks.get(attack_name)
    if regression_suite(advbs_client, attack_name):
        ctx.exit(1)
