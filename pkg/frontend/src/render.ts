// Plain-DOM rendering of the view model: one panel per running process
// (process term plus store table), one per monitor (executed actions struck
// through to the left of a cursor glyph, remaining protocol after it, and
// the variable/name stacks), plus redex buttons and the step breadcrumb.

import { HistoryEntry, ViewSink } from "./controller.js"
import { MonitorPanel, RunnerPanel, monitorStacksConsistent } from "./displayParse.js"
import { RedexButton, ViewModel } from "./viewModel.js"

const el = <K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] => {
  const node = document.createElement(tag)
  if (cls) node.className = cls
  if (text !== undefined) node.textContent = text
  return node
}

const renderRunner = (r: RunnerPanel): HTMLElement => {
  const panel = el("div", "panel runner")
  panel.appendChild(el("h3", undefined, `process [${r.endpoints.join(", ")}]`))
  panel.appendChild(el("code", "term", r.process))
  if (r.store.length) {
    const table = el("table", "store")
    const head = el("tr")
    head.append(el("th", undefined, "variable"), el("th", undefined, "history (current last)"))
    table.appendChild(head)
    for (const row of r.store) {
      const tr = el("tr")
      tr.append(el("td", undefined, row.variable), el("td", undefined, row.history.join(" · ")))
      table.appendChild(tr)
    }
    panel.appendChild(table)
  } else {
    panel.appendChild(el("p", "empty", "store is empty"))
  }
  return panel
}

const renderMonitor = (m: MonitorPanel): HTMLElement => {
  const panel = el("div", "panel monitor")
  panel.appendChild(el("h3", undefined, `monitor ${m.endpoint}`))
  const proto = el("div", "protocol")
  for (const act of m.past) {
    const s = el("s", "past", act)
    proto.appendChild(s)
    proto.appendChild(document.createTextNode("."))
  }
  proto.appendChild(el("span", "cursor", "▸"))
  proto.appendChild(el("span", "future", m.future))
  panel.appendChild(proto)
  panel.appendChild(el("p", "stacks", `vars: [${m.vars.join(", ")}]`))
  panel.appendChild(el("p", "stacks", `names: [${m.names.join(", ")}]`))
  return panel
}

export class DomSink implements ViewSink {
  private onApply: (key: string) => void = () => {}
  private onJump: (steps: number) => void = () => {}

  constructor(private root: HTMLElement) {}

  wire(onApply: (key: string) => void, onJump: (steps: number) => void): void {
    this.onApply = onApply
    this.onJump = onJump
  }

  showError(message: string): void {
    const box = this.root.querySelector(".errors")
    if (box) box.textContent = message
  }

  private renderButtons(buttons: RedexButton[], busy: boolean): HTMLElement {
    const box = el("div", "redexes")
    for (const b of buttons) {
      const btn = el("button", b.backward ? "undo" : "step",
        `${b.rule} ${b.labelText}`)
      btn.title = b.desc
      btn.disabled = busy
      btn.addEventListener("click", () => this.onApply(b.key))
      box.appendChild(btn)
    }
    if (!buttons.length) box.appendChild(el("span", "empty", "none"))
    return box
  }

  render(vm: ViewModel, history: HistoryEntry[], busy: boolean): void {
    this.root.replaceChildren()
    this.root.appendChild(el("div", "errors"))

    const crumb = el("div", "breadcrumb")
    const start = el("button", "crumb", "start")
    start.disabled = busy
    start.addEventListener("click", () => this.onJump(0))
    crumb.appendChild(start)
    history.forEach((entry, i) => {
      const b = el("button", "crumb", `${i + 1}. ${entry.rule}`)
      b.disabled = busy
      b.addEventListener("click", () => this.onJump(i + 1))
      crumb.appendChild(b)
    })
    this.root.appendChild(crumb)

    const cols = el("div", "columns")
    const left = el("div", "col")
    left.appendChild(el("h2", undefined, "forward"))
    left.appendChild(this.renderButtons(vm.forward, busy))
    left.appendChild(el("h2", undefined, "backward"))
    left.appendChild(this.renderButtons(vm.backward, busy))
    cols.appendChild(left)

    const right = el("div", "col panels")
    if (vm.view.nil) right.appendChild(el("p", "empty", "empty configuration"))
    if (vm.view.restricted.length)
      right.appendChild(el("p", "restricted",
        `restricted: ${vm.view.restricted.join(", ")}`))
    for (const r of vm.view.runners) right.appendChild(renderRunner(r))
    for (const m of vm.view.monitors) right.appendChild(renderMonitor(m))
    if (!monitorStacksConsistent(vm.view))
      this.showError("monitor stacks disagree with executed actions")
    cols.appendChild(right)
    this.root.appendChild(cols)

    this.root.appendChild(el("pre", "canonical", vm.canonical))
  }
}
