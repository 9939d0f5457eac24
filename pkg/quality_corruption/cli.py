# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import argparse
import json
import logging
import sys
from typing import List, Optional
from . import __version__
from .attacks import AttackConfig, attack_mapping
from .defenses import catalog
from .detector import TrainingHyper
from .exceptions import QualityCorruptionError
from .harness import at_config_from_dict, attack_config_from_dict, load_yaml
from .metrics import FailureModeThresholds
from .quality_corruption import (
    attack_checkpoint, audit_dumps, convert_report, defend, generate_dataset, sweep, train_detector
)

logger = logging.getLogger('quality_corruption')


def setup_logging(verbose: bool = False, log_file: Optional[str] = None):
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode='a+'))
    logging.basicConfig(
        format='[%(asctime)s] %(levelname)s %(name)s - %(message)s',
        datefmt='%Y/%m/%d %H:%M:%S',
        level=logging.DEBUG if verbose else logging.INFO,
        handlers=handlers,
        force=True
    )


def _attack_from_args(args) -> AttackConfig:
    values = load_yaml(args.attack_config) if args.attack_config else {}
    for name in ('norm', 'eps', 'steps', 'step_size', 'loss', 'method', 'fmp_lambda', 'seed'):
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    if getattr(args, 'random_start', False):
        values['random_start'] = True
    return attack_config_from_dict(values)


def _thresholds(args) -> FailureModeThresholds:
    return FailureModeThresholds(qc_tau=args.qc_tau, drr_tau=args.drr_tau)


def _by_id(args) -> bool:
    # neither ordering flag given: ascending id
    return args.by_id is not False


################################################################################
#                                 SUBCOMMANDS                                  #
################################################################################

def _gen_data(args):
    path = generate_dataset(args.output, args.n_images, args.image_size, args.seed, args.progress)
    logger.info('Annotations written to %s', path)


def _train(args):
    hyper = TrainingHyper(epochs=args.epochs, lr=args.lr, batch_size=args.batch_size, seed=args.seed,
                          progress=args.progress)
    path, history = train_detector(args.dataset, args.output, args.config, hyper, args.model_id, args.subset,
                                   args.validation_fraction, _by_id(args))
    if history:
        logger.info('Final loss %.4f, validation mAP@50 %s', history[-1].loss, history[-1].map50)
    logger.info('Checkpoint written to %s', path)


def _attack(args):
    row = attack_checkpoint(args.checkpoint, args.dataset, _attack_from_args(args), args.output,
                            args.subset, _by_id(args), args.workers, args.source, args.random_control,
                            args.save_perturbations, _thresholds(args))
    logger.info('DRR %.1f  mAP drop %.1f  QCI %+.1f  (%s)', row['drr'], row['map_drop_pct'], row['qci'], row['mode'])


def _audit(args):
    report = audit_dumps(args.annotations, args.clean, args.adversarial, args.output, args.model_id,
                         _thresholds(args), strict=not args.lenient)
    print(json.dumps(report.to_dict()['row'], indent=2, default=str))
    for warning in report.warnings:
        logger.warning(warning)
    for error in report.errors:
        logger.error(error)


def _sweep(args):
    result = sweep(args.config, progress=args.progress, output=args.output, subset=args.subset,
                   subset_by_id=args.by_id, workers=args.workers)
    for error in result.errors:
        logger.error(error)
    logger.info('%d rows written to %s', len(result.rows), ', '.join(str(path) for path in result.paths))


def _defend(args):
    at = at_config_from_dict(load_yaml(args.at_config)) if args.at_config else None
    results = defend(args.checkpoint, args.dataset, _attack_from_args(args), args.output, args.methods,
                     args.subset, at, args.train_dataset, args.certification, _by_id(args), _thresholds(args))
    for row in results['framework']:
        logger.info('%-22s expected: %-36s observed: %s [%s]', row['component'], row['expected'],
                    row['observed'], row['failure'])


def _report(args):
    path = convert_report(args.source, args.output, args.format)
    if path.suffix == '.txt':
        print(path.read_text(encoding='utf-8'))


################################################################################
#                                   PARSER                                     #
################################################################################

def _add_subset(parser: argparse.ArgumentParser):
    parser.add_argument('--subset', type=int, default=None, help='Evaluate only N images.')
    order = parser.add_mutually_exclusive_group()
    order.add_argument('--by-id', dest='by_id', action='store_true',
                       help='Take the subset as the first N images by ascending id (default).')
    order.add_argument('--by-position', '--file-order', dest='by_id', action='store_false',
                       help='Take the subset in annotation file order instead.')
    parser.set_defaults(by_id=None)


def _add_attack(parser: argparse.ArgumentParser):
    parser.add_argument('--attack-config', help='YAML attack configuration; flags override it.')
    parser.add_argument('--norm', choices=attack_mapping.norms)
    parser.add_argument('--eps', type=float, help='Budget: 1/255 units for linf, pixel L2 norm for l2.')
    parser.add_argument('--steps', type=int)
    parser.add_argument('--step-size', dest='step_size', type=float)
    parser.add_argument('--loss', choices=tuple(attack_mapping.loss_mapping))
    parser.add_argument('--method', choices=sorted({method for method, _ in attack_mapping.method_mapping}))
    parser.add_argument('--fmp-lambda', dest='fmp_lambda', type=float)
    parser.add_argument('--random-start', action='store_true')
    parser.add_argument('--seed', type=int)


def _add_thresholds(parser: argparse.ArgumentParser):
    defaults = FailureModeThresholds()
    parser.add_argument('--qc-tau', type=float, default=defaults.qc_tau)
    parser.add_argument('--drr-tau', type=float, default=defaults.drr_tau)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='quality-corruption',
                                     description='Quality-corruption robustness toolkit for spiking detectors.')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging.')
    parser.add_argument('--log-file', help='Also log to this file.')
    parser.add_argument('--progress', action='store_true', help='Show progress bars.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_data = subparsers.add_parser('gen-data', help='Generate the synthetic shapes dataset.')
    gen_data.add_argument('output')
    gen_data.add_argument('--n-images', type=int, default=600)
    gen_data.add_argument('--image-size', type=int, default=64)
    gen_data.add_argument('--seed', type=int, default=0)
    gen_data.set_defaults(func=_gen_data)

    train = subparsers.add_parser('train', help='Train a toy detector and save a checkpoint.')
    train.add_argument('dataset')
    train.add_argument('output')
    train.add_argument('--config', help='YAML detector configuration.')
    train.add_argument('--model-id')
    train.add_argument('--epochs', type=int, default=30)
    train.add_argument('--lr', type=float, default=1e-3)
    train.add_argument('--batch-size', type=int, default=16)
    train.add_argument('--seed', type=int, default=0)
    train.add_argument('--validation-fraction', type=float, default=0.0)
    _add_subset(train)
    train.set_defaults(func=_train)

    attack = subparsers.add_parser('attack', help='Attack a checkpoint and report the cell.')
    attack.add_argument('checkpoint')
    attack.add_argument('dataset')
    attack.add_argument('output')
    attack.add_argument('--workers', type=int, default=1)
    attack.add_argument('--source', help='Craft on this checkpoint instead (transfer attack).')
    attack.add_argument('--random-control', action='store_true', help='Random noise of the same budget.')
    attack.add_argument('--save-perturbations', action='store_true')
    _add_attack(attack)
    _add_subset(attack)
    _add_thresholds(attack)
    attack.set_defaults(func=_attack)

    audit = subparsers.add_parser('audit', help='Audit external COCO result dumps.')
    audit.add_argument('annotations')
    audit.add_argument('clean')
    audit.add_argument('adversarial')
    audit.add_argument('--output')
    audit.add_argument('--model-id', default='external')
    audit.add_argument('--lenient', action='store_true', help='Skip bad records instead of failing.')
    _add_thresholds(audit)
    audit.set_defaults(func=_audit)

    sweep_parser = subparsers.add_parser('sweep', help='Run a YAML-configured model x attack sweep.')
    sweep_parser.add_argument('config')
    sweep_parser.add_argument('--output')
    sweep_parser.add_argument('--workers', type=int)
    _add_subset(sweep_parser)
    sweep_parser.set_defaults(func=_sweep)

    defend_parser = subparsers.add_parser('defend', help='Run the defense battery on a checkpoint.')
    defend_parser.add_argument('checkpoint')
    defend_parser.add_argument('dataset')
    defend_parser.add_argument('output')
    defend_parser.add_argument('--methods', nargs='+', choices=[method.name for method in catalog()])
    defend_parser.add_argument('--at-config', help='YAML adversarial-training configuration.')
    defend_parser.add_argument('--train-dataset')
    defend_parser.add_argument('--certification', action='store_true')
    _add_attack(defend_parser)
    _add_subset(defend_parser)
    _add_thresholds(defend_parser)
    defend_parser.set_defaults(func=_defend)

    report = subparsers.add_parser('report', help='Convert a report between csv, json and txt.')
    report.add_argument('source')
    report.add_argument('output')
    report.add_argument('--format', choices=('csv', 'json', 'txt'))
    report.set_defaults(func=_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.log_file)
    try:
        args.func(args)
    except QualityCorruptionError as error:
        logger.error('%s: %s', type(error).__name__, error)
        return 1
    except FileNotFoundError as error:
        logger.error('Missing file: %s', error.filename)
        return 2
    return 0


if __name__ == '__main__':
    sys.exit(main())
