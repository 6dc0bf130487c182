// View model: what one service response looks like on screen.

import { ConfigView, parseCanonical } from "./displayParse.js"
import { RedexInfo, RedexListing } from "./protocol.js"

export interface RedexButton {
  key: string
  rule: string
  labelText: string
  desc: string
  backward: boolean
}

export interface ViewModel {
  canonical: string
  view: ConfigView
  forward: RedexButton[]
  backward: RedexButton[]
}

const labelText = (r: RedexInfo): string => {
  const eps = [...r.label.endpoints].sort().join(",")
  return r.label.service ? `{${eps};${r.label.service}}` : `{${eps}}`
}

const button = (r: RedexInfo): RedexButton => ({
  key: r.key,
  rule: r.rule,
  labelText: labelText(r),
  desc: r.desc,
  backward: r.direction === "backward",
})

export const buildViewModel = (canonical: string, redexes: RedexListing): ViewModel => ({
  canonical,
  view: parseCanonical(canonical),
  forward: redexes.forward.map(button),
  backward: redexes.backward.map(button),
})
