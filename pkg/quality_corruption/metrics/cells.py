# -*- coding: utf-8 -*-
#!/usr/bin/env python3

from collections import defaultdict
from typing import Dict, List, Sequence
from .qc import CellResult, PerImageQCI, per_image_qci
from ..detector import ProtocolDetections
from ..evaluation import GroundTruth, map50


def group_by_image(gts: Sequence[GroundTruth]) -> Dict[int, List[GroundTruth]]:
    grouped: Dict[int, List[GroundTruth]] = defaultdict(list)
    for gt in gts:
        grouped[gt.image_id].append(gt)
    return grouped


def build_cell(model_id: str, clean: ProtocolDetections, adversarial: ProtocolDetections,
               gts: Sequence[GroundTruth], norm: str = 'none', eps: float = 0.0,
               steps: int = 0, loss: str = 'clean') -> CellResult:
    return CellResult(
        model_id=model_id,
        map_clean=map50(clean.all_ranked(), gts),
        map_adv=map50(adversarial.all_ranked(), gts),
        count_clean=clean.total_count,
        count_adv=adversarial.total_count,
        norm=norm,
        eps=eps,
        steps=steps,
        loss=loss
    )


def per_image_qci_values(clean: ProtocolDetections, adversarial: ProtocolDetections,
                         gts: Sequence[GroundTruth]) -> List[PerImageQCI]:
    grouped = group_by_image(gts)
    return [
        per_image_qci(clean.emitted[image_id], adversarial.emitted.get(image_id, []),
                      grouped.get(image_id, []), image_id)
        for image_id in clean.image_ids
    ]
