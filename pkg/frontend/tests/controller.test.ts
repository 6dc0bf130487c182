import { describe, expect, it } from "vitest"

import { HistoryEntry, StepperUi, ViewSink } from "../src/controller.js"
import { LineTransport, StepperClient } from "../src/protocol.js"
import { ViewModel } from "../src/viewModel.js"

const INITIAL =
  "proc[]{ a(y:?int.end). y?(z). 0 } store{} | proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}"
const POST_OPEN =
  "new(s0,~s0). (proc[s0]{ y?(z). 0 } store{ y = [s0] } | proc[~s0]{ x!<5>. 0 } store{ x = [~s0] } | mon s0{ ^?int.end ; [y] ; [a] } | mon ~s0{ ^!int.end ; [x] ; [~a] })"
const POST_COM =
  "new(s0,~s0). (proc[s0]{ 0 } store{ y = [s0], z = [5] } | proc[~s0]{ 0 } store{ x = [~s0] } | mon s0{ ?int.^end ; [y,z] ; [a,y] } | mon ~s0{ !int.^end ; [x,5] ; [~a,x] })"

const OPEN = { key: "k-open", direction: "forward", rule: "Open",
  label: { endpoints: ["s0", "~s0"], service: "a" }, desc: "Open on a" }
const COM = { key: "k-com", direction: "forward", rule: "Com",
  label: { endpoints: ["s0", "~s0"], service: null }, desc: "Com on s0" }
const OPENU = { key: "k-openu", direction: "backward", rule: "OpenU",
  label: { endpoints: ["s0", "~s0"], service: "a" }, desc: "OpenU on a" }
const COMU = { key: "k-comu", direction: "backward", rule: "ComU",
  label: { endpoints: ["s0", "~s0"], service: null }, desc: "ComU on s0" }

const STATES: Record<string, { canonical: string; redexes: unknown }> = {
  initial: { canonical: INITIAL, redexes: { forward: [OPEN], backward: [] } },
  open: { canonical: POST_OPEN, redexes: { forward: [COM], backward: [OPENU] } },
  com: { canonical: POST_COM, redexes: { forward: [], backward: [COMU] } },
}

// Tiny scripted stepper: walks the three-state chain by redex key, answers
// StaleRedex on anything else. Mimics the real service's one-line responses.
const fakeService = () => {
  let state = "initial"
  let deliver: (line: string) => void = () => {}
  const log: Array<Record<string, unknown>> = []
  const step = (key: unknown): string | null => {
    const moves: Record<string, Record<string, string>> = {
      initial: { "k-open": "open" },
      open: { "k-com": "com", "k-openu": "initial" },
      com: { "k-comu": "open" },
    }
    return moves[state]?.[String(key)] ?? null
  }
  const transport: LineTransport = {
    send: (line) => {
      const req = JSON.parse(line) as Record<string, unknown>
      log.push(req)
      let body: Record<string, unknown>
      if (req.op === "load") {
        state = "initial"
        body = { ok: true, session: "tok", ...STATES[state]! }
      } else if (req.op === "reset") {
        state = "initial"
        body = { ok: true, session: "tok", ...STATES[state]! }
      } else if (req.op === "redexes") {
        body = { ok: true, session: "tok", ...STATES[state]! }
      } else if (req.op === "apply") {
        const next = step(req.redex)
        if (next === null) {
          body = { ok: false, error: `StaleRedex: ${req.redex} not applicable` }
        } else {
          state = next
          body = { ok: true, session: "tok", ...STATES[state]! }
        }
      } else {
        body = { ok: false, error: "unknown op" }
      }
      queueMicrotask(() => deliver(JSON.stringify({ id: req.id, ...body })))
    },
    onLine: (cb) => {
      deliver = cb
    },
    onClose: () => {},
    close: () => {},
  }
  return { transport, log }
}

class RecordingSink implements ViewSink {
  renders: Array<{ vm: ViewModel; history: HistoryEntry[]; busy: boolean }> = []
  errors: string[] = []

  render(vm: ViewModel, history: HistoryEntry[], busy: boolean): void {
    this.renders.push({ vm, history, busy })
  }

  showError(message: string): void {
    this.errors.push(message)
  }

  get last() {
    return this.renders[this.renders.length - 1]!
  }
}

const makeUi = () => {
  const svc = fakeService()
  const sink = new RecordingSink()
  const ui = new StepperUi(new StepperClient(svc.transport), sink)
  return { ui, sink, log: svc.log }
}

describe("StepperUi", () => {
  it("renders the loaded program: two process panels, one Open button", async () => {
    const { ui, sink } = makeUi()
    await ui.load("whatever the user typed")
    const { vm } = sink.last
    expect(vm.canonical).toBe(INITIAL) // exactly what the service said
    expect(vm.view.runners).toHaveLength(2)
    expect(vm.view.monitors).toHaveLength(0)
    expect(vm.forward.map((b) => b.rule)).toEqual(["Open"])
    expect(vm.backward).toEqual([]) // nothing to undo at the start
  })

  it("after Open shows two monitors with the cursor at position zero", async () => {
    const { ui, sink } = makeUi()
    await ui.load("p")
    await ui.applyRedex("k-open")
    const { vm, history } = sink.last
    expect(vm.canonical).toBe(POST_OPEN)
    expect(vm.view.monitors).toHaveLength(2)
    for (const mon of vm.view.monitors) expect(mon.past).toHaveLength(0)
    expect(history.map((h) => h.rule)).toEqual(["Open"])
    expect(vm.backward.map((b) => b.rule)).toEqual(["OpenU"])
  })

  it("undo is applying a backward key", async () => {
    const { ui, sink } = makeUi()
    await ui.load("p")
    await ui.applyRedex("k-open")
    await ui.applyRedex("k-openu")
    expect(sink.last.vm.canonical).toBe(INITIAL)
  })

  it("refreshes the redex list on a stale key and keeps history", async () => {
    const { ui, sink, log } = makeUi()
    await ui.load("p")
    await ui.applyRedex("k-open")
    await ui.applyRedex("k-open") // stale now
    expect(sink.errors).toHaveLength(1)
    expect(sink.errors[0]).toMatch(/no longer applies/)
    expect(log.map((r) => r.op)).toEqual(["load", "apply", "apply", "redexes"])
    expect(sink.last.vm.canonical).toBe(POST_OPEN) // state untouched
    expect(sink.last.history.map((h) => h.rule)).toEqual(["Open"])
  })

  it("marks the view busy while a request is in flight", async () => {
    const { ui, sink } = makeUi()
    await ui.load("p")
    const p = ui.applyRedex("k-open")
    expect(ui.isBusy()).toBe(true)
    expect(sink.last.busy).toBe(true)
    await expect(ui.applyRedex("k-com")).rejects.toThrow(/in flight/)
    await p
    expect(ui.isBusy()).toBe(false)
    expect(sink.last.busy).toBe(false)
  })

  it("breadcrumb jump replays reset plus the key prefix", async () => {
    const { ui, sink, log } = makeUi()
    await ui.load("p")
    await ui.applyRedex("k-open")
    await ui.applyRedex("k-com")
    expect(sink.last.vm.canonical).toBe(POST_COM)
    log.length = 0
    await ui.jumpTo(1)
    expect(log.map((r) => [r.op, r.redex])).toEqual(
      [["reset", undefined], ["apply", "k-open"]])
    expect(sink.last.vm.canonical).toBe(POST_OPEN)
    expect(sink.last.history.map((h) => h.rule)).toEqual(["Open"])
  })

  it("never invents state: every rendered canonical came from the service", async () => {
    const { ui, sink } = makeUi()
    await ui.load("p")
    await ui.applyRedex("k-open")
    await ui.applyRedex("k-com")
    await ui.jumpTo(0)
    const seen = new Set(sink.renders.map((r) => r.vm.canonical))
    for (const text of seen) {
      expect([INITIAL, POST_OPEN, POST_COM]).toContain(text)
    }
  })
})
