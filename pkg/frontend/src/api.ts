import type { Metrics, QueuePage, VerdictAck, VerdictBody } from "./types";

export class HttpError extends Error {
    constructor(
        public readonly status: number,
        public readonly detail: string,
    ) {
        super(`HTTP ${status}: ${detail}`);
    }
}

export interface AuditApi {
    fetchQueue(status: "pending" | "decided" | null, page: number): Promise<QueuePage>;
    fetchMetrics(): Promise<Metrics>;
    postVerdict(candidateId: string, body: VerdictBody): Promise<VerdictAck>;
    imageUrl(candidateId: string): string;
}

async function parseOrThrow(res: Response): Promise<unknown> {
    if (res.ok) {
        return res.json();
    }
    let detail = res.statusText;
    try {
        const body = (await res.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
    } catch {
        // non-JSON error body; keep the status text
    }
    throw new HttpError(res.status, detail);
}

export class HttpAuditApi implements AuditApi {
    constructor(private readonly base: string = "") {}

    async fetchQueue(status: "pending" | "decided" | null, page: number): Promise<QueuePage> {
        const params = new URLSearchParams({ page: String(page) });
        if (status) params.set("status", status);
        const res = await fetch(`${this.base}/candidates?${params}`);
        return (await parseOrThrow(res)) as QueuePage;
    }

    async fetchMetrics(): Promise<Metrics> {
        const res = await fetch(`${this.base}/metrics`);
        return (await parseOrThrow(res)) as Metrics;
    }

    async postVerdict(candidateId: string, body: VerdictBody): Promise<VerdictAck> {
        const res = await fetch(
            `${this.base}/candidates/${encodeURIComponent(candidateId)}/verdict`,
            {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(body),
            },
        );
        return (await parseOrThrow(res)) as VerdictAck;
    }

    imageUrl(candidateId: string): string {
        return `${this.base}/candidates/${encodeURIComponent(candidateId)}/image`;
    }
}
