from .oracle import ORACLE_IDENTITIES, ClosedForms, EvalPoint, eval_series, oracle_suite, theta_num
