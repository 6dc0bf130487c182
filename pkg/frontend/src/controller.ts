// UI logic, DOM-free: load programs, apply/undo redexes, keep a breadcrumb
// of applied steps, and recover from stale redex keys by refreshing.
//
// All semantics come from service responses; the controller never builds or
// rewrites a configuration, it only displays what the service returned.

import { StepperClient, isStale } from "./protocol.js"
import { ViewModel, buildViewModel } from "./viewModel.js"

export interface HistoryEntry {
  key: string
  rule: string
  canonical: string // state after this step, as reported by the service
}

export interface ViewSink {
  render(vm: ViewModel, history: HistoryEntry[], busy: boolean): void
  showError(message: string): void
}

export class StepperUi {
  session: string | null = null
  history: HistoryEntry[] = []
  current: ViewModel | null = null
  private busy = false

  constructor(private client: StepperClient, private sink: ViewSink) {}

  isBusy(): boolean {
    return this.busy
  }

  private show(): void {
    if (this.current) this.sink.render(this.current, [...this.history], this.busy)
  }

  private async withBusy<T>(work: () => Promise<T>): Promise<T> {
    if (this.busy) throw new Error("a request is already in flight")
    this.busy = true
    this.show()
    try {
      return await work()
    } finally {
      this.busy = false
      this.show()
    }
  }

  async load(text: string): Promise<void> {
    await this.withBusy(async () => {
      const resp = await this.client.request("load", { text })
      this.session = resp.session!
      this.history = []
      this.current = buildViewModel(resp.canonical!, resp.redexes!)
    })
  }

  private ruleOf(key: string): string {
    const all = [...(this.current?.forward ?? []), ...(this.current?.backward ?? [])]
    return all.find((b) => b.key === key)?.rule ?? "?"
  }

  // Forward and backward buttons go through the same op; a backward key is
  // an undo. On a stale key the redex list is refreshed and the user retries.
  async applyRedex(key: string): Promise<void> {
    if (!this.session) throw new Error("no program loaded")
    const rule = this.ruleOf(key)
    await this.withBusy(async () => {
      try {
        const resp = await this.client.request("apply", {
          session: this.session!,
          redex: key,
        })
        this.history.push({ key, rule, canonical: resp.canonical! })
        this.current = buildViewModel(resp.canonical!, resp.redexes!)
      } catch (e) {
        if (isStale(e)) {
          const fresh = await this.client.request("redexes", { session: this.session! })
          this.current = buildViewModel(fresh.canonical!, fresh.redexes!)
          this.sink.showError("that step no longer applies; the list was refreshed")
          return
        }
        throw e
      }
    })
  }

  // Breadcrumb click: replay the first `steps` entries via reset + prefix.
  async jumpTo(steps: number): Promise<void> {
    if (!this.session) throw new Error("no program loaded")
    const prefix = this.history.slice(0, steps)
    await this.withBusy(async () => {
      let resp = await this.client.request("reset", { session: this.session! })
      for (const entry of prefix) {
        resp = await this.client.request("apply", {
          session: this.session!,
          redex: entry.key,
        })
      }
      this.history = prefix
      this.current = buildViewModel(resp.canonical!, resp.redexes!)
    })
  }
}
