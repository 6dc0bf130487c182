import { describe, expect, it } from "vitest"

import { monitorStacksConsistent, parseCanonical } from "../src/displayParse.js"

// Texts exactly as the service prints them.
const INITIAL =
  "proc[]{ a(y:?int.end). y?(z). 0 } store{} | proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}"
const POST_OPEN =
  "new(s0,~s0). (proc[s0]{ y?(z). 0 } store{ y = [s0] } | proc[~s0]{ x!<5>. 0 } store{ x = [~s0] } | mon s0{ ^?int.end ; [y] ; [a] } | mon ~s0{ ^!int.end ; [x] ; [~a] })"
const POST_COM =
  "new(s0,~s0). (proc[s0]{ 0 } store{ y = [s0], z = [5] } | proc[~s0]{ 0 } store{ x = [~s0] } | mon s0{ ?int.^end ; [y,z] ; [a,y] } | mon ~s0{ !int.^end ; [x,5] ; [~a,x] })"

describe("parseCanonical", () => {
  it("handles the empty configuration", () => {
    const v = parseCanonical("0")
    expect(v.nil).toBe(true)
    expect(v.runners).toHaveLength(0)
    expect(v.monitors).toHaveLength(0)
  })

  it("splits an initial configuration into runner panels", () => {
    const v = parseCanonical(INITIAL)
    expect(v.restricted).toEqual([])
    expect(v.runners).toHaveLength(2)
    expect(v.monitors).toHaveLength(0)
    expect(v.runners[0]!.process).toBe("a(y:?int.end). y?(z). 0")
    expect(v.runners[0]!.store).toEqual([])
    expect(v.runners[1]!.endpoints).toEqual([])
  })

  it("reads endpoints, stores, and monitors after establishment", () => {
    const v = parseCanonical(POST_OPEN)
    expect(v.restricted).toEqual(["s0", "~s0"])
    expect(v.runners.map((r) => r.endpoints)).toEqual([["s0"], ["~s0"]])
    expect(v.runners[0]!.store).toEqual([{ variable: "y", history: ["s0"] }])
    expect(v.monitors.map((m) => m.endpoint)).toEqual(["s0", "~s0"])
    const mon = v.monitors[0]!
    expect(mon.past).toEqual([])
    expect(mon.future).toBe("?int.end")
    expect(mon.vars).toEqual(["y"])
    expect(mon.names).toEqual(["a"])
  })

  it("shows executed actions left of the cursor", () => {
    const v = parseCanonical(POST_COM)
    const recv = v.monitors[0]!
    expect(recv.past).toEqual(["?int"])
    expect(recv.future).toBe("end")
    expect(recv.vars).toEqual(["y", "z"])
    expect(recv.names).toEqual(["a", "y"])
    const send = v.monitors[1]!
    expect(send.past).toEqual(["!int"])
    expect(send.vars).toEqual(["x", "5"])
    const store = v.runners[0]!.store
    expect(store).toEqual([
      { variable: "y", history: ["s0"] },
      { variable: "z", history: ["5"] },
    ])
  })

  it("monitor stacks always hold one entry per executed action plus one", () => {
    for (const text of [INITIAL, POST_OPEN, POST_COM]) {
      expect(monitorStacksConsistent(parseCanonical(text))).toBe(true)
    }
    const broken = parseCanonical(POST_COM.replace("[y,z]", "[y]"))
    expect(monitorStacksConsistent(broken)).toBe(false)
  })
})
