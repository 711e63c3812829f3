from radregion.audit.ensemble import ensemble_predict
from radregion.audit.fixture import archive_audit_fixture
from radregion.audit.flags import AuditCandidate, flag_mismatches
from radregion.audit.metrics import accuracy_report, cm_delta, confusion_matrix
from radregion.audit.predictions import PredictionSet
from radregion.audit.verdicts import CorrectedEvaluation, Verdict, VerdictLedger, apply_verdicts, record_verdict

__all__ = [
    "PredictionSet",
    "accuracy_report",
    "confusion_matrix",
    "cm_delta",
    "ensemble_predict",
    "AuditCandidate",
    "flag_mismatches",
    "Verdict",
    "VerdictLedger",
    "record_verdict",
    "apply_verdicts",
    "CorrectedEvaluation",
    "archive_audit_fixture",
]
