// Review-session state machine. All mutation goes through methods that
// mirror reviewer actions; rendering subscribes to snapshots. Server
// responses are the source of truth: local state only adds the staged
// choice, the session history for undo, and the unsent retry queue.

import { HttpError, type AuditApi } from "./api";
import type { CandidateItem, Decision, Metrics, VerdictBody } from "./types";

export interface StagedChoice {
    decision: Decision;
    relabelTo?: string;
    label: string;
}

export interface HistoryEntry {
    candidate: CandidateItem;
    body: VerdictBody;
}

export interface QueuedVerdict {
    candidateId: string;
    body: VerdictBody;
}

export interface ReviewState {
    queue: CandidateItem[];
    position: number;
    staged: StagedChoice | null;
    metrics: Metrics | null;
    history: HistoryEntry[];
    offline: boolean;
    retryQueue: QueuedVerdict[];
    notice: string | null;
    busy: boolean;
    pendingTotal: number;
    finished: boolean;
}

export interface RetryStorage {
    load(): QueuedVerdict[];
    save(queue: QueuedVerdict[]): void;
}

export class MemoryRetryStorage implements RetryStorage {
    private queue: QueuedVerdict[] = [];
    load(): QueuedVerdict[] {
        return [...this.queue];
    }
    save(queue: QueuedVerdict[]): void {
        this.queue = [...queue];
    }
}

type Listener = (state: ReviewState) => void;

export class ReviewStore {
    private state: ReviewState;
    private listeners = new Set<Listener>();

    constructor(
        private readonly api: AuditApi,
        private readonly reviewer: string,
        private readonly storage: RetryStorage = new MemoryRetryStorage(),
    ) {
        this.state = {
            queue: [],
            position: 0,
            staged: null,
            metrics: null,
            history: [],
            offline: false,
            retryQueue: storage.load(),
            notice: null,
            busy: false,
            pendingTotal: 0,
            finished: false,
        };
    }

    subscribe(fn: Listener): () => void {
        this.listeners.add(fn);
        fn(this.snapshot());
        return () => this.listeners.delete(fn);
    }

    snapshot(): ReviewState {
        return { ...this.state, queue: [...this.state.queue] };
    }

    current(): CandidateItem | null {
        return this.state.queue[this.state.position] ?? null;
    }

    private patch(update: Partial<ReviewState>): void {
        this.state = { ...this.state, ...update };
        for (const fn of this.listeners) fn(this.snapshot());
    }

    private connectionFailure(err: unknown): Partial<ReviewState> {
        if (err instanceof HttpError) {
            return { notice: `server error (${err.status}): ${err.detail}` };
        }
        return { offline: true, notice: "offline: cannot reach the audit service" };
    }

    async loadQueue(): Promise<void> {
        this.patch({ busy: true });
        try {
            const items: CandidateItem[] = [];
            let page = 0;
            for (;;) {
                const chunk = await this.api.fetchQueue("pending", page);
                items.push(...chunk.items);
                if ((page + 1) * chunk.page_size >= chunk.total) break;
                page += 1;
            }
            this.patch({
                queue: items,
                position: 0,
                pendingTotal: items.length,
                finished: items.length === 0,
                offline: false,
                busy: false,
            });
            await this.refreshMetrics();
        } catch (err) {
            this.patch({ busy: false, ...this.connectionFailure(err) });
        }
    }

    async refreshMetrics(): Promise<void> {
        try {
            const metrics = await this.api.fetchMetrics();
            this.patch({ metrics, offline: false });
        } catch (err) {
            this.patch(this.connectionFailure(err));
        }
    }

    stage(choice: StagedChoice): void {
        const candidate = this.current();
        if (!candidate) return;
        if (choice.decision === "relabel" && choice.relabelTo === candidate.archive_label) {
            this.patch({ notice: "relabel target equals the archive label" });
            return;
        }
        this.patch({ staged: choice, notice: null });
    }

    clearStaged(): void {
        this.patch({ staged: null });
    }

    /** Confirm the staged choice: POST, record history, advance the queue. */
    async confirm(): Promise<boolean> {
        const candidate = this.current();
        const staged = this.state.staged;
        if (!candidate || !staged || this.state.busy) return false;
        const body: VerdictBody = {
            decision: staged.decision,
            reviewer: this.reviewer,
        };
        if (staged.decision === "relabel" && staged.relabelTo) {
            body.relabel_to = staged.relabelTo;
        }
        this.patch({ busy: true });
        const sent = await this.send(candidate.id, body);
        if (!sent.delivered && !sent.queued) {
            this.patch({ busy: false });
            return false;
        }
        const history = [...this.state.history, { candidate, body }];
        const position = this.state.position + 1;
        this.patch({
            busy: false,
            staged: null,
            history,
            position,
            finished: position >= this.state.queue.length,
        });
        if (sent.delivered) await this.refreshMetrics();
        return true;
    }

    /** Undo: re-open the previous candidate; the next confirm supersedes. */
    undo(): void {
        const history = [...this.state.history];
        const last = history.pop();
        if (!last) {
            this.patch({ notice: "nothing to undo" });
            return;
        }
        const index = this.state.queue.findIndex((c) => c.id === last.candidate.id);
        this.patch({
            history,
            position: index >= 0 ? index : 0,
            staged: null,
            finished: false,
            notice: `re-opened ${last.candidate.id} (was ${last.body.decision})`,
        });
    }

    /** Re-send verdicts that failed while offline. */
    async flushRetryQueue(): Promise<void> {
        const queue = [...this.state.retryQueue];
        if (!queue.length) return;
        const remaining: QueuedVerdict[] = [];
        for (const entry of queue) {
            const sent = await this.send(entry.candidateId, entry.body, false);
            if (!sent.delivered) remaining.push(entry);
        }
        this.storage.save(remaining);
        this.patch({ retryQueue: remaining, offline: remaining.length > 0 });
        if (remaining.length < queue.length) await this.refreshMetrics();
    }

    private async send(
        candidateId: string,
        body: VerdictBody,
        queueOnFailure = true,
    ): Promise<{ delivered: boolean; queued: boolean }> {
        try {
            await this.api.postVerdict(candidateId, body);
            return { delivered: true, queued: false };
        } catch (err) {
            if (err instanceof HttpError) {
                // 409/422: the server rejected the verdict; surface and drop
                this.patch({
                    notice: `server rejected verdict (${err.status}): ${err.detail}`,
                });
                return { delivered: false, queued: false };
            }
            if (!queueOnFailure) {
                return { delivered: false, queued: false };
            }
            const retryQueue = [...this.state.retryQueue, { candidateId, body }];
            this.storage.save(retryQueue);
            this.patch({
                retryQueue,
                offline: true,
                notice: "offline: verdict queued locally, will retry",
            });
            return { delivered: false, queued: true };
        }
    }
}
