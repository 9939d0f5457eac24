# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from quality_corruption.defenses import purification_mapping  # noqa: E402
from quality_corruption.harness import harness_mapping  # noqa: E402
from quality_corruption.metrics import metrics_mapping  # noqa: E402
from quality_corruption.substrate import (  # noqa: E402
    classify_substrate, reference_substrates, substrate_mapping
)


class DocumentationGenerator():
    def __init__(self):
        # content
        self._introduction_filename = 'content/introduction.md'
        self._substrates_filename = 'content/substrates.md'
        self._purification_filename = 'content/purification.md'
        self._report_filename = 'content/report.md'
        # documentation results
        self._output_filename = 'README.md'

    def generate_documentation(self):
        self._generate_introduction()
        self._generate_substrates_documentation()
        self._generate_purification_documentation()
        self._generate_report_documentation()

    def write_documentation(self):
        with open(self._output_filename, 'wt', encoding='utf-8') as f:
            f.write('\n\n'.join(
                [
                    self._introduction,
                    self._substrates,
                    self._purification,
                    self._report
                ]
            ))

    def _generate_introduction(self):
        with open(self._introduction_filename, 'rt', encoding='utf-8') as f:
            self._introduction = f.read().strip()

    def _generate_substrates_documentation(self):
        header = ('Detector', 'ANN reference', 'Encoding', 'Neuron', 'T', '(i)', '(ii)', '(iii)', 'Status')
        substrates = reference_substrates()
        lines = []
        for name, row in substrate_mapping.reference_detectors.items():
            lines.append((
                name, row['ann_reference'], row['encoding'], row['neuron'], str(row['T']),
                row['c1_binary_spikes'], self._yes_no(row['c2_ac_only']), self._yes_no(row['c3_no_dense_matmul']),
                classify_substrate(substrates[name]).value
            ))
        encodings = [(encoding, status) for encoding, status in substrate_mapping.encoding_binary_constraint.items()]
        with open(self._substrates_filename, 'rt', encoding='utf-8') as f:
            self._substrates = f.read().format(
                _substrate_table_=self._parse_table(header, lines),
                _encoding_table_=self._parse_table(('Encoding', 'Binary spikes'), encodings)
            ).strip()

    def _generate_purification_documentation(self):
        lines = []
        for name, (domain, _, params) in purification_mapping.purification_catalog.items():
            if name == 'identity':
                continue
            lines.append((name, domain, ', '.join(f'{key}={value}' for key, value in params.items())))
        framework = [
            (component, expected) for component, expected in purification_mapping.framework_expectations.items()
        ]
        with open(self._purification_filename, 'rt', encoding='utf-8') as f:
            self._purification = f.read().format(
                _purification_table_=self._parse_table(('Method', 'Signal domain', 'Parameters'), lines),
                _verdicts_=', '.join(f'`{label}`' for label in purification_mapping.verdict_labels.values()),
                _framework_table_=self._parse_table(('Component', 'Expected when count and accuracy couple'), framework)
            ).strip()

    def _generate_report_documentation(self):
        text_table = self._parse_table(
            tuple(title for title, _, _ in metrics_mapping.text_table_columns),
            [tuple(f'`{column}`' for _, column, _ in metrics_mapping.text_table_columns)]
        )
        with open(self._report_filename, 'rt', encoding='utf-8') as f:
            self._report = f.read().format(
                _report_columns_='\n'.join(f'- `{column}`' for column in metrics_mapping.report_columns),
                _extra_columns_=', '.join(f'`{column}`' for column in harness_mapping.report_extra_columns),
                _text_table_=text_table,
                _failure_modes_=', '.join(f'`{label}`' for label in metrics_mapping.failure_mode_labels)
            ).strip() + '\n'

    @staticmethod
    def _parse_table(header, lines):
        table = [f"| {' | '.join(header)} |", f"|{'|'.join('---' for _ in header)}|"]
        table.extend(f"| {' | '.join(line)} |" for line in lines)
        return '\n'.join(table)

    @staticmethod
    def _yes_no(value: bool) -> str:
        return 'yes' if value else 'no'


if __name__ == '__main__':
    documentation = DocumentationGenerator()
    documentation.generate_documentation()
    documentation.write_documentation()
