import json
import logging
import os

import pandas as pd

logger = logging.getLogger(__name__)

COLUMNS = ['run_id', 'suite', 'check', 'status', 'order', 'elapsed_ms', 'residual_sample', 'detail']


class ExcelManager:
    def __init__(self, excel_file="verification_runs.xlsx"):
        self.excel_file = excel_file

    @staticmethod
    def to_frame(results, run_id=None):
        """One row per report; accepts CheckReport or CheckResult objects"""
        rows = []
        for result in results:
            data = result.to_dict()
            rows.append({
                'run_id': run_id,
                'suite': data['suite'],
                'check': data['check'],
                'status': data['status'],
                'order': data['order'],
                'elapsed_ms': data['elapsed_ms'],
                'residual_sample': '\n'.join(data['residual_sample']),
                'detail': json.dumps(data['detail'], sort_keys=True, default=str),
            })
        return pd.DataFrame(rows, columns=COLUMNS)

    def save_results(self, results, run_id=None, sheet_name='reports'):
        """Write the results to the workbook, replacing it"""
        df = self.to_frame(results, run_id)
        directory = os.path.dirname(self.excel_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        df.to_excel(self.excel_file, sheet_name=sheet_name, index=False, engine='openpyxl')
        logger.info("exported %d rows to %s", len(df), self.excel_file)
        return self.excel_file

    def get_all_results(self, sheet_name='reports'):
        try:
            df = pd.read_excel(self.excel_file, sheet_name=sheet_name, engine='openpyxl')
        except FileNotFoundError:
            return pd.DataFrame(columns=COLUMNS)
        # empty cells come back as NaN
        for column in ('residual_sample', 'order'):
            df[column] = df[column].fillna('')
        return df

    def get_failures(self):
        df = self.get_all_results()
        return df[df['status'] == 'fail']
