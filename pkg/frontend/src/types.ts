// Wire types of the audit service HTTP contract. The UI renders only what
// these endpoints return; it never infers anything client-side.

export const REGIONS = [
    "clavicle", "shoulder", "skull", "rib", "elbow", "knee", "wrist",
    "hand", "foot", "ankle", "pelvis_hip", "cervical_spine",
    "thoracic_spine", "lumbar_spine",
] as const;

export type Region = (typeof REGIONS)[number];

export interface SoftmaxEntry {
    region: string;
    p: number;
}

export interface ActiveVerdict {
    decision: string;
    relabel_to: string | null;
    reviewer: string;
}

export interface CandidateItem {
    id: string;
    queue_position: number;
    archive_label: string;
    prediction: string;
    confidence: number;
    softmax_top3: SoftmaxEntry[];
    status: "pending" | "decided";
    verdict?: ActiveVerdict;
}

export interface QueuePage {
    items: CandidateItem[];
    page: number;
    page_size: number;
    total: number;
    pending_total: number;
}

export interface PerClassMetric {
    region: string;
    original: number | null;
    corrected: number | null;
    delta: number | null;
}

export interface Metrics {
    original_accuracy: number;
    corrected_accuracy: number;
    n_total: number;
    n_kept: number;
    n_excluded: number;
    n_relabeled: number;
    pending: number;
    decided: number;
    per_class: PerClassMetric[];
}

export type Decision = "archive_correct" | "relabel" | "out_of_domain" | "unusable";

export interface VerdictBody {
    decision: Decision;
    relabel_to?: string;
    reviewer: string;
}

export interface VerdictAck {
    ok: boolean;
    candidate: string;
    active_verdict: {
        decision: string;
        relabel_to: number | null;
        reviewer: string;
        timestamp: string;
    };
}
